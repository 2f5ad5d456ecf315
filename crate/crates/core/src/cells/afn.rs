use rayon::prelude::*;
use serde::Serialize;

use super::CellPartition;
use crate::error::{Error, Result};
use crate::hecke::KLTable;

/// a-value attached to a two-sided cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellAValue {
    /// Largest observed value over the cell's members.
    pub value: u32,
    pub certified: bool,
    /// `identity`, `bound` (equals the number of positive roots) or `tabulated`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<&'static str>,
}

/// Observed a-values `max deg_v h_{x,y,z}` over in-ball products, with certification.
///
/// Observed values are lower bounds. A cell value is certified when it is forced: the cell of
/// the identity, the universal upper bound, or agreement of all cell values with a tabulated
/// list (one value per cell). An element is certified when its own observed value already
/// reaches its certified cell value.
#[derive(Clone, Debug)]
pub struct AFunctionTable {
    raw: Vec<u32>,
    cell_of: Vec<usize>,
    cells: Vec<CellAValue>,
    bound: u32,
}

impl AFunctionTable {
    pub fn compute(table: &KLTable, partition: &CellPartition, tabulated: Option<&[u32]>) -> AFunctionTable {
        let ball = table.ball();
        let nc = ball.core_count();
        let raw_core = (0..nc)
            .into_par_iter()
            .fold(
                || vec![0u32; nc],
                |mut acc, y| {
                    for x in 0..table.left_factors(y) {
                        for (z, c) in table.core_h_row(x, y).expect("pair inside the ball") {
                            let d = c.degree().unwrap_or(0).max(0) as u32;
                            let slot = &mut acc[*z as usize];
                            *slot = (*slot).max(d);
                        }
                    }
                    acc
                },
            )
            .reduce(|| vec![0u32; nc], |a, b| a.into_iter().zip(b).map(|(x, y)| x.max(y)).collect());
        // length-zero twists permute products, so the value only depends on the core
        let raw: Vec<u32> = (0..ball.len()).map(|id| raw_core[ball.split(id).0]).collect();
        Self::from_raw(raw, partition, ball.datum().n_positive_roots() as u32, tabulated)
    }

    pub fn from_raw(raw: Vec<u32>, partition: &CellPartition, bound: u32, tabulated: Option<&[u32]>) -> AFunctionTable {
        let cell_of: Vec<usize> = (0..raw.len()).map(|id| partition.cell_of(id)).collect();
        let mut values = vec![0u32; partition.n_cells()];
        for (id, &a) in raw.iter().enumerate() {
            values[cell_of[id]] = values[cell_of[id]].max(a);
        }
        let table_match = tabulated.is_some_and(|t| {
            let mut want = t.to_vec();
            let mut have = values.clone();
            want.sort_unstable();
            have.sort_unstable();
            want == have
        });
        let cells = values
            .iter()
            .enumerate()
            .map(|(c, &value)| {
                let reason = if c == cell_of[0] && value == 0 {
                    Some("identity")
                } else if value == bound {
                    Some("bound")
                } else if table_match {
                    Some("tabulated")
                } else {
                    None
                };
                CellAValue { value, certified: reason.is_some(), reason }
            })
            .collect();
        AFunctionTable { raw, cell_of, cells, bound }
    }

    /// Observed value at an element.
    pub fn value(&self, id: usize) -> u32 {
        self.raw[id]
    }

    pub fn is_certified(&self, id: usize) -> bool {
        let c = &self.cells[self.cell_of[id]];
        c.certified && c.value == self.raw[id]
    }

    /// `(observed value, certified)` at an element.
    pub fn get(&self, id: usize) -> (u32, bool) {
        (self.value(id), self.is_certified(id))
    }

    pub fn cell(&self, c: usize) -> &CellAValue {
        &self.cells[c]
    }

    pub fn cells(&self) -> &[CellAValue] {
        &self.cells
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn all_cells_certified(&self) -> bool {
        self.cells.iter().all(|c| c.certified)
    }

    /// The certified a-value of a cell, or an error naming it.
    pub fn require_certified(&self, c: usize) -> Result<u32> {
        let cell = &self.cells[c];
        if cell.certified {
            Ok(cell.value)
        } else {
            Err(Error::Uncertified(format!("cell {c} has observed value {} only", cell.value)))
        }
    }

    /// `c < c'` implies `a(c) > a(c')` for every pair of certified cells.
    pub fn order_reversing(&self, partition: &CellPartition) -> bool {
        let k = self.cells.len();
        (0..k).all(|c| {
            (0..k).all(|d| {
                c == d
                    || !partition.two_sided.leq(c, d)
                    || !(self.cells[c].certified && self.cells[d].certified)
                    || self.cells[c].value > self.cells[d].value
            })
        })
    }
}

/// Involutions `d` of the Coxeter part in cell `c` with `l(d) - 2 deg_q P_{e,d} = a(c)`.
pub fn distinguished_involutions(table: &KLTable, partition: &CellPartition, afn: &AFunctionTable, c: usize) -> Result<Vec<usize>> {
    let a = afn.require_certified(c)?;
    let ball = table.ball();
    Ok(partition
        .two_sided
        .members(c)
        .iter()
        .copied()
        .filter(|&d| {
            let (core, k) = ball.split(d);
            if k != 0 || ball.core_inverse(core) != core {
                return false;
            }
            let deg = table.core_p(0, core).degree().unwrap_or(0);
            ball.core_length(core) as i64 - 2 * deg as i64 == a as i64
        })
        .collect())
}
