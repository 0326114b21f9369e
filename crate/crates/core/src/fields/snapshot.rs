//! ASCII field snapshots.
//!
//! Layout: one header line `dim n1 [n2 [n3]] components t`, where `n_a` is
//! the number of cells on axis `a`, followed by one line per node in
//! row-major order carrying that node's components. Values are written with
//! 17 significant digits so reading them back is bit-exact.

use std::io::{BufRead, Write};
use std::sync::Arc;

use super::field::Field;
use super::grid::Grid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub dim: usize,
    pub cells: Vec<usize>,
    pub time: f64,
    /// Component-major storage, `components[c][node]`.
    pub components: Vec<Vec<f64>>,
}

impl Snapshot {
    pub fn of<F: Field>(field: &F, time: f64) -> Self {
        let g = field.grid();
        Self {
            dim: g.dim(),
            cells: (0..g.dim()).map(|a| g.cells(a)).collect(),
            time,
            components: field.components().to_vec(),
        }
    }

    /// Unit-spacing-agnostic grid check: a snapshot fits a grid when the
    /// dimension and cell counts agree.
    pub fn fits(&self, grid: &Arc<Grid>) -> bool {
        self.dim == grid.dim() && (0..self.dim).all(|a| self.cells[a] == grid.cells(a))
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "{}", self.dim)?;
        for n in &self.cells {
            write!(out, " {n}")?;
        }
        writeln!(out, " {} {:.16e}", self.components.len(), self.time)?;
        let len = self.components.first().map_or(0, |c| c.len());
        for i in 0..len {
            let mut first = true;
            for c in &self.components {
                if !first {
                    write!(out, " ")?;
                }
                first = false;
                write!(out, "{:.16e}", c[i])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty snapshot".into()))??;
        let toks: Vec<&str> = header.split_whitespace().collect();
        let dim: usize = parse(toks.first().copied(), "dim")?;
        if toks.len() != dim + 3 {
            return Err(Error::Parse(format!(
                "header needs {} fields for dim {dim}, got {}",
                dim + 3,
                toks.len()
            )));
        }
        let cells: Vec<usize> = (0..dim)
            .map(|a| parse(Some(toks[1 + a]), "cell count"))
            .collect::<Result<_>>()?;
        let ncomp: usize = parse(Some(toks[1 + dim]), "components")?;
        let time: f64 = parse(Some(toks[2 + dim]), "time")?;
        let nodes: usize = cells.iter().map(|n| n + 1).product();

        let mut components = vec![Vec::with_capacity(nodes); ncomp];
        let mut count = 0usize;
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            for tok in line.split_whitespace() {
                let v: f64 = parse(Some(tok), "value")?;
                let c = count % ncomp;
                components[c].push(v);
                count += 1;
            }
        }
        if count != nodes * ncomp {
            return Err(Error::Parse(format!(
                "expected {} values, found {count}",
                nodes * ncomp
            )));
        }
        Ok(Self {
            dim,
            cells,
            time,
            components,
        })
    }
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse(format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::Parse(format!("bad {what}: {tok:?}")))
}
