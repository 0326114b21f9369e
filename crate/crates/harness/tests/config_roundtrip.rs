use oldroyd_core::rheology::PressureLaw;
use oldroyd_harness::presets::{DensityIc, ForcingPreset, StressIc, VelocityIc};
use oldroyd_harness::RunConfig;
use proptest::prelude::*;

fn pressure() -> impl Strategy<Value = PressureLaw> {
    prop_oneof![
        Just(PressureLaw::Linear),
        (1e-3f64..1e3).prop_map(|cs| PressureLaw::Isothermal { cs }),
        (1e-3f64..1e3).prop_map(|kappa| PressureLaw::Quadratic { kappa }),
    ]
}

prop_compose! {
    fn config()(
        dim in 2usize..=3,
        n in 4usize..200,
        extent in 1e-3f64..1e3,
        eps in 1e-3f64..1.0,
        omega in 0.01f64..0.99,
        we in 1e-6f64..1e6,
        a in -1.0f64..1.0,
        p in pressure(),
        steps in 1usize..500,
        dt in 1e-9f64..1.0,
        tol in 1e-15f64..1e-2,
        amps in prop::array::uniform4(-1e3f64..1e3),
        b1 in prop::option::of(1e-9f64..1e9),
        scheme in any::<bool>(),
        presets in prop::array::uniform4(any::<bool>()),
        out in "[a-z][a-z0-9_/]{0,20}",
    ) -> RunConfig {
        let mut c = RunConfig::default();
        c.grid.dim = dim;
        c.grid.n = n;
        c.grid.extent = extent;
        c.params.eps = eps;
        c.params.omega = omega;
        c.params.we = we;
        c.params.a = a;
        c.params.pressure = p;
        c.time.dt = dt;
        c.time.t_final = dt * steps as f64;
        c.solver.tol_lin = tol;
        c.solver.tol_fp = tol * 3.0;
        c.solver.stress_scheme = if scheme {
            oldroyd_core::transport::StressScheme::BackwardEuler
        } else {
            Default::default()
        };
        c.ic.velocity = if presets[0] { VelocityIc::Vortex } else { VelocityIc::Zero };
        c.ic.density = if presets[1] { DensityIc::CosineDensity } else { DensityIc::Zero };
        c.ic.stress = if presets[2] { StressIc::ProportionalStress } else { StressIc::Zero };
        c.forcing.preset = if presets[3] { ForcingPreset::Ramp } else { ForcingPreset::Steady };
        c.ic.velocity_amp = amps[0];
        c.ic.density_amp = amps[1];
        c.ic.stress_amp = amps[2];
        c.forcing.amp = amps[3];
        c.budget.b1 = b1;
        c.output = out.into();
        c
    }
}

proptest! {
    #[test]
    fn parse_serialize_parse_is_identity(c in config()) {
        let text = c.to_text();
        let once = RunConfig::parse(&text).unwrap();
        prop_assert_eq!(&once, &c);
        prop_assert_eq!(once.to_text(), text);
    }
}

#[test]
fn shipped_configs_are_valid_and_round_trip() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for name in ["zero.cfg", "smalldata2d.cfg", "band_violation.cfg"] {
        let c = RunConfig::load(&dir.join(name)).unwrap();
        c.validate().unwrap();
        assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c, "{name}");
    }
}
