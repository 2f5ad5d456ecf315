//! Cell preorders, cell partitions and two-sided ideals inside a ball.
//!
//! The preorders are generated by multiplication with simple `C_s` on either side (and by the
//! length-zero group in the extended case). Everything is computed on a truncated ball: edges
//! leading outside it are dropped, so the partition near the boundary can be finer than the true
//! one. [`stabilization`] compares against a smaller radius to detect this.

mod afn;

pub use afn::{distinguished_involutions, AFunctionTable, CellAValue};

use fixedbitset::FixedBitSet;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use rayon::prelude::*;
use serde::Serialize;

use crate::coxeter::Side;
use crate::hecke::{Basis, HeckeElt, KLTable};

/// Which preorder a graph or partition refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preorder {
    Left,
    Right,
    TwoSided,
}

/// Directed graph on ball ids: `u -> z` when `C_z` occurs in a generator multiple of `C_u`.
#[derive(Clone, Debug)]
pub struct PreorderGraph {
    pub kind: Preorder,
    pub edges: Vec<Vec<u32>>,
    /// Elements with a generator multiple that leaves the ball.
    pub escaped: FixedBitSet,
}

/// Builds the generating graph of a cell preorder.
pub fn preorder_graph(table: &KLTable, kind: Preorder) -> PreorderGraph {
    let ball = table.ball();
    let rank = ball.datum().rank();
    let n_omega = ball.n_omega();
    let sides: &[Side] = match kind {
        Preorder::Left => &[Side::Left],
        Preorder::Right => &[Side::Right],
        Preorder::TwoSided => &[Side::Left, Side::Right],
    };
    let per_node: Vec<(Vec<u32>, bool)> = (0..ball.len())
        .into_par_iter()
        .map(|u| {
            let mut out = Vec::new();
            let mut escaped = false;
            for &side in sides {
                for s in 0..rank {
                    let (row, esc) = table.gen_product(s, u, side);
                    escaped |= esc;
                    out.extend(row.into_iter().map(|(z, _)| z as u32).filter(|&z| z as usize != u));
                }
                for k in 1..n_omega {
                    let z = match side {
                        Side::Left => ball.omega_lmul(k, u),
                        Side::Right => ball.omega_rmul(u, k),
                    };
                    out.push(z as u32);
                }
            }
            out.sort_unstable();
            out.dedup();
            (out, escaped)
        })
        .collect();
    let mut escaped = FixedBitSet::with_capacity(ball.len());
    let edges = per_node
        .into_iter()
        .enumerate()
        .map(|(u, (e, esc))| {
            escaped.set(u, esc);
            e
        })
        .collect();
    PreorderGraph { kind, edges, escaped }
}

/// Strongly connected components of a preorder graph with the induced partial order.
///
/// Classes are numbered by their smallest member, so class 0 contains the identity.
#[derive(Clone, Debug)]
pub struct Classes {
    class_of: Vec<usize>,
    members: Vec<Vec<usize>>,
    // below[c] = classes reachable from c (c included)
    below: Vec<FixedBitSet>,
    hasse: Vec<(usize, usize)>,
}

impl Classes {
    pub fn from_graph(graph: &PreorderGraph) -> Classes {
        let n = graph.edges.len();
        let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
        for _ in 0..n {
            g.add_node(());
        }
        for (u, es) in graph.edges.iter().enumerate() {
            for &z in es {
                g.add_edge(NodeIndex::new(u), NodeIndex::new(z as usize), ());
            }
        }
        let sccs = tarjan_scc(&g);
        let k = sccs.len();
        // tarjan order lists sinks first; relabel by smallest member
        let mut order: Vec<usize> = (0..k).collect();
        let mins: Vec<usize> = sccs.iter().map(|c| c.iter().map(|v| v.index()).min().unwrap()).collect();
        order.sort_by_key(|&i| mins[i]);
        let mut relabel = vec![0; k];
        for (new, &old) in order.iter().enumerate() {
            relabel[old] = new;
        }
        let mut class_of = vec![0; n];
        let mut members = vec![Vec::new(); k];
        for (old, comp) in sccs.iter().enumerate() {
            for v in comp {
                class_of[v.index()] = relabel[old];
                members[relabel[old]].push(v.index());
            }
        }
        for m in &mut members {
            m.sort_unstable();
        }
        let mut below = vec![FixedBitSet::with_capacity(k); k];
        for comp in &sccs {
            let c = class_of[comp[0].index()];
            let mut acc = FixedBitSet::with_capacity(k);
            acc.insert(c);
            for v in comp {
                for &z in &graph.edges[v.index()] {
                    let d = class_of[z as usize];
                    if d != c {
                        acc.union_with(&below[d]);
                    }
                }
            }
            below[c] = acc;
        }
        let mut hasse = Vec::new();
        for hi in 0..k {
            for lo in below[hi].ones() {
                if lo == hi {
                    continue;
                }
                let covered = below[hi].ones().any(|mid| mid != hi && mid != lo && below[mid].contains(lo));
                if !covered {
                    hasse.push((lo, hi));
                }
            }
        }
        hasse.sort_unstable();
        Classes { class_of, members, below, hasse }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn class_of(&self, id: usize) -> usize {
        self.class_of[id]
    }

    pub fn members(&self, c: usize) -> &[usize] {
        &self.members[c]
    }

    /// `c <= d` in the induced order (`c` reachable from `d`).
    pub fn leq(&self, c: usize, d: usize) -> bool {
        self.below[d].contains(c)
    }

    /// Covering pairs `(lower, upper)`.
    pub fn hasse(&self) -> &[(usize, usize)] {
        &self.hasse
    }

    /// Whether element `z` is below element `u` in the preorder.
    pub fn elem_leq(&self, z: usize, u: usize) -> bool {
        self.leq(self.class_of[z], self.class_of[u])
    }
}

/// Left, right and two-sided cells of a ball.
#[derive(Clone, Debug)]
pub struct CellPartition {
    pub left: Classes,
    pub right: Classes,
    pub two_sided: Classes,
    radius: usize,
    escaped: FixedBitSet,
}

/// Assembles a partition from the three preorder graphs.
pub fn partition_cells(left: &PreorderGraph, right: &PreorderGraph, two_sided: &PreorderGraph) -> CellPartition {
    let mut escaped = left.escaped.clone();
    escaped.union_with(&right.escaped);
    CellPartition {
        left: Classes::from_graph(left),
        right: Classes::from_graph(right),
        two_sided: Classes::from_graph(two_sided),
        radius: usize::MAX,
        escaped,
    }
}

impl CellPartition {
    pub fn compute(table: &KLTable) -> CellPartition {
        let graphs: Vec<PreorderGraph> = [Preorder::Left, Preorder::Right, Preorder::TwoSided]
            .into_par_iter()
            .map(|k| preorder_graph(table, k))
            .collect();
        let mut p = partition_cells(&graphs[0], &graphs[1], &graphs[2]);
        p.radius = table.radius();
        p
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn n_elements(&self) -> usize {
        self.two_sided.class_of.len()
    }

    pub fn classes(&self, kind: Preorder) -> &Classes {
        match kind {
            Preorder::Left => &self.left,
            Preorder::Right => &self.right,
            Preorder::TwoSided => &self.two_sided,
        }
    }

    /// Two-sided cell of an element.
    pub fn cell_of(&self, id: usize) -> usize {
        self.two_sided.class_of(id)
    }

    pub fn n_cells(&self) -> usize {
        self.two_sided.len()
    }

    /// Whether some generator multiple of `id` leaves the ball.
    pub fn touches_boundary(&self, id: usize) -> bool {
        self.escaped.contains(id)
    }

    /// Left cells contained in a two-sided cell.
    pub fn left_cells_in(&self, c: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.two_sided.members(c).iter().map(|&w| self.left.class_of(w)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Checks that every left and right cell lies inside one two-sided cell.
    pub fn unions_consistent(&self) -> bool {
        [&self.left, &self.right].iter().all(|cls| {
            cls.members.iter().all(|m| m.iter().all(|&w| self.cell_of(w) == self.cell_of(m[0])))
        })
    }
}

/// Membership test for the two-sided ideal spanned by all `C_w` with `w <=_LR c`.
pub struct IdealMembership<'a> {
    table: &'a KLTable,
    allowed: FixedBitSet,
}

impl IdealMembership<'_> {
    pub fn contains_id(&self, id: usize) -> bool {
        self.allowed.contains(id)
    }

    /// Whether a C-basis element has its support below the cell. Support outside the ball is
    /// never a member.
    pub fn contains(&self, h: &HeckeElt) -> bool {
        h.basis() == Basis::C
            && h.support().all(|w| self.table.ball().id_of(w).is_some_and(|id| self.allowed.contains(id)))
    }
}

pub fn ideal_leq_c<'a>(table: &'a KLTable, partition: &CellPartition, c: usize) -> IdealMembership<'a> {
    let mut allowed = FixedBitSet::with_capacity(partition.n_elements());
    for id in 0..partition.n_elements() {
        if partition.two_sided.leq(partition.cell_of(id), c) {
            allowed.insert(id);
        }
    }
    IdealMembership { table, allowed }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdealViolation {
    pub element: String,
    pub generator: String,
    pub side: Side,
    pub outside: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdealReport {
    pub cell: usize,
    pub members_below: usize,
    pub products_checked: usize,
    pub products_skipped: usize,
    pub violations: Vec<IdealViolation>,
}

impl IdealReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Multiplies every `C_w` with `w <=_LR c` by each simple `C_s` on both sides (and by the
/// length-zero elements) and checks that the result stays in the ideal. Products leaving the
/// ball are counted as skipped.
pub fn verify_ideal_closure(table: &KLTable, partition: &CellPartition, c: usize) -> IdealReport {
    let ideal = ideal_leq_c(table, partition, c);
    let ball = table.ball();
    let datum = ball.datum();
    let members: Vec<usize> = ideal.allowed.ones().collect();
    let results: Vec<(usize, usize, Vec<IdealViolation>)> = members
        .par_iter()
        .map(|&w| {
            let mut checked = 0;
            let mut skipped = 0;
            let mut bad = Vec::new();
            for side in [Side::Left, Side::Right] {
                for s in 0..datum.rank() {
                    let (row, escaped) = table.gen_product(s, w, side);
                    if escaped {
                        skipped += 1;
                        continue;
                    }
                    checked += 1;
                    for (z, _) in row {
                        if !ideal.contains_id(z) {
                            bad.push(IdealViolation {
                                element: ball.display(w),
                                generator: datum.gen_label(s).to_string(),
                                side,
                                outside: ball.display(z),
                            });
                        }
                    }
                }
                for k in 1..ball.n_omega() {
                    checked += 1;
                    let z = match side {
                        Side::Left => ball.omega_lmul(k, w),
                        Side::Right => ball.omega_rmul(w, k),
                    };
                    if !ideal.contains_id(z) {
                        bad.push(IdealViolation {
                            element: ball.display(w),
                            generator: format!("w{k}"),
                            side,
                            outside: ball.display(z),
                        });
                    }
                }
            }
            (checked, skipped, bad)
        })
        .collect();
    let mut report =
        IdealReport { cell: c, members_below: members.len(), products_checked: 0, products_skipped: 0, violations: Vec::new() };
    for (ch, sk, bad) in results {
        report.products_checked += ch;
        report.products_skipped += sk;
        report.violations.extend(bad);
    }
    report
}

/// Comparison of the partition at radius `L` with the one at `L - 2`.
#[derive(Clone, Debug, Serialize)]
pub struct Stabilization {
    pub radius: usize,
    pub previous_radius: usize,
    pub cells: usize,
    pub previous_cells: usize,
    pub stable: bool,
}

/// Recomputes the partition on the ball of radius `L - 2` and checks that it has the same
/// number of two-sided cells and induces the same equivalence relation on the smaller ball.
pub fn stabilization(table: &KLTable, partition: &CellPartition) -> Stabilization {
    let r = table.radius();
    let prev_r = r.saturating_sub(2);
    let small = table.truncate(prev_r);
    let prev = CellPartition::compute(&small);
    let n = small.ball().len();
    let mut same = prev.n_cells() == partition.n_cells();
    if same {
        let mut map = vec![usize::MAX; prev.n_cells()];
        for id in 0..n {
            let a = prev.cell_of(id);
            let b = partition.cell_of(id);
            if map[a] == usize::MAX {
                map[a] = b;
            } else if map[a] != b {
                same = false;
            }
        }
        let mut image: Vec<usize> = map.iter().copied().filter(|&b| b != usize::MAX).collect();
        image.sort_unstable();
        let before = image.len();
        image.dedup();
        same &= image.len() == before;
    }
    Stabilization {
        radius: r,
        previous_radius: prev_r,
        cells: partition.n_cells(),
        previous_cells: prev.n_cells(),
        stable: same && prev_r < r,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ElementRecord {
    pub word: String,
    pub length: usize,
    pub left_cell: usize,
    pub right_cell: usize,
    pub two_sided_cell: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellRecord {
    pub id: usize,
    pub representative: String,
    pub size: usize,
    pub left_cells: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionExport {
    pub cells: Vec<CellRecord>,
    /// Covering pairs `[lower, upper]` of the two-sided order.
    pub order: Vec<(usize, usize)>,
    pub elements: Vec<ElementRecord>,
}

/// Serializable view of a partition, optionally decorated by a-values.
pub fn export(table: &KLTable, partition: &CellPartition, afn: Option<&AFunctionTable>) -> PartitionExport {
    let ball = table.ball();
    let cells = (0..partition.n_cells())
        .map(|c| CellRecord {
            id: c,
            representative: ball.display(partition.two_sided.members(c)[0]),
            size: partition.two_sided.members(c).len(),
            left_cells: partition.left_cells_in(c).len(),
            a: afn.map(|a| a.cell(c).value),
            certified: afn.map(|a| a.cell(c).certified),
        })
        .collect();
    let elements = (0..ball.len())
        .map(|id| ElementRecord {
            word: ball.display(id),
            length: ball.length(id),
            left_cell: partition.left.class_of(id),
            right_cell: partition.right.class_of(id),
            two_sided_cell: partition.cell_of(id),
            a: afn.map(|a| a.value(id)),
            certified: afn.map(|a| a.is_certified(id)),
        })
        .collect();
    PartitionExport { cells, order: partition.two_sided.hasse().to_vec(), elements }
}

/// The two-sided cell order as a DOT digraph, edges pointing from higher to lower cells.
pub fn to_dot(table: &KLTable, partition: &CellPartition, afn: Option<&AFunctionTable>) -> String {
    let ball = table.ball();
    let mut out = String::from("digraph cells {\n  rankdir=TB;\n");
    for c in 0..partition.n_cells() {
        let rep = ball.display(partition.two_sided.members(c)[0]);
        let size = partition.two_sided.members(c).len();
        let a = afn.map(|a| format!(", a={}", a.cell(c).value)).unwrap_or_default();
        out.push_str(&format!("  c{c} [label=\"{rep} ({size}{a})\"];\n"));
    }
    for &(lo, hi) in partition.two_sided.hasse() {
        out.push_str(&format!("  c{hi} -> c{lo};\n"));
    }
    out.push_str("}\n");
    out
}
