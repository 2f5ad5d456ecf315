//! Nilpotent orbit closure posets and their matching with two-sided cells.
//!
//! Type A posets are generated from partitions under the dominance order. Other types are read
//! from the JSON tables in `data/`.

use serde::{Deserialize, Serialize};

use crate::cells::{AFunctionTable, CellPartition};
use crate::coxeter::TypeLabel;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitNode {
    pub label: String,
    /// Dimension of the Springer fibre over a point of the orbit.
    pub dim_springer: u32,
    pub dim_orbit: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<u32>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct PosetFile {
    #[serde(rename = "type")]
    label: String,
    group: String,
    #[serde(default)]
    source: String,
    nodes: Vec<OrbitNode>,
    edges: Vec<(usize, usize)>,
}

/// Orbits with their closure order, given by covering pairs `(lower, upper)`.
#[derive(Clone, Debug)]
pub struct OrbitPoset {
    pub label: String,
    pub group: String,
    pub nodes: Vec<OrbitNode>,
    pub hasse: Vec<(usize, usize)>,
    leq: Vec<Vec<bool>>,
}

const C2_TABLE: &str = include_str!("../data/c2_affine.json");
const G2_TABLE: &str = include_str!("../data/g2_affine.json");

/// Partitions of `n` in decreasing lexicographic order.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in (1..=max.min(n)).rev() {
            prefix.push(k);
            go(n - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// `mu <= lambda` in dominance order (partial sums of `mu` never exceed those of `lambda`).
pub fn dominates(lambda: &[u32], mu: &[u32]) -> bool {
    let len = lambda.len().max(mu.len());
    let (mut a, mut b) = (0u32, 0u32);
    for i in 0..len {
        a += lambda.get(i).copied().unwrap_or(0);
        b += mu.get(i).copied().unwrap_or(0);
        if b > a {
            return false;
        }
    }
    true
}

/// `n(lambda) = sum (i - 1) lambda_i`, the Springer fibre dimension in type A.
pub fn partition_statistic(lambda: &[u32]) -> u32 {
    lambda.iter().enumerate().map(|(i, &l)| i as u32 * l).sum()
}

fn format_partition(lambda: &[u32]) -> String {
    let parts: Vec<String> = lambda.iter().map(|p| p.to_string()).collect();
    format!("({})", parts.join(","))
}

impl OrbitPoset {
    fn build(label: String, group: String, nodes: Vec<OrbitNode>, edges: Vec<(usize, usize)>) -> Result<OrbitPoset> {
        let n = nodes.len();
        if edges.iter().any(|&(a, b)| a >= n || b >= n || a == b) {
            return Err(Error::Format("edge refers to a missing node".into()));
        }
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in &edges {
            leq[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(Error::Format("closure relation has a cycle".into()));
                }
            }
        }
        let mut hasse: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && leq[i][j])
            .collect();
        hasse.retain(|&(i, j)| !(0..n).any(|k| k != i && k != j && leq[i][k] && leq[k][j]));
        let poset = OrbitPoset { label, group, nodes, hasse, leq };
        poset.validate()?;
        Ok(poset)
    }

    fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        let maxima = (0..n).filter(|&i| (0..n).all(|j| self.leq[j][i])).count();
        let minima = (0..n).filter(|&i| (0..n).all(|j| self.leq[i][j])).count();
        if n == 0 || maxima != 1 || minima != 1 {
            return Err(Error::Format(format!("poset {} lacks a unique maximum and minimum", self.label)));
        }
        for &(lo, hi) in &self.hasse {
            if self.nodes[lo].dim_springer <= self.nodes[hi].dim_springer {
                return Err(Error::Format(format!(
                    "Springer fibre dimension does not drop from {} to {}",
                    self.nodes[lo].label, self.nodes[hi].label
                )));
            }
        }
        Ok(())
    }

    /// Orbits of `sl_n`: partitions of `n` under dominance.
    pub fn type_a(n: u32) -> OrbitPoset {
        let parts = partitions(n);
        let nn = n * n.saturating_sub(1);
        let nodes: Vec<OrbitNode> = parts
            .iter()
            .map(|p| {
                let b = partition_statistic(p);
                OrbitNode { label: format_partition(p), dim_springer: b, dim_orbit: nn - 2 * b, partition: Some(p.clone()) }
            })
            .collect();
        let mut edges = Vec::new();
        for (i, p) in parts.iter().enumerate() {
            for (j, q) in parts.iter().enumerate() {
                if i != j && dominates(q, p) {
                    edges.push((i, j));
                }
            }
        }
        Self::build(format!("A{}", n.saturating_sub(1)), format!("SL{n}"), nodes, edges).expect("dominance order is a lattice")
    }

    /// Reads the JSON table format: `type`, `group`, `nodes` and `edges` as `[lower, upper]`.
    pub fn from_json(text: &str) -> Result<OrbitPoset> {
        let file: PosetFile = serde_json::from_str(text)?;
        Self::build(file.label, file.group, file.nodes, file.edges)
    }

    pub fn to_json(&self) -> String {
        let file = PosetFile {
            label: self.label.clone(),
            group: self.group.clone(),
            source: String::new(),
            nodes: self.nodes.clone(),
            edges: self.hasse.clone(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Whether orbit `i` lies in the closure of orbit `j`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    /// The regular orbit.
    pub fn maximum(&self) -> usize {
        (0..self.len()).find(|&i| (0..self.len()).all(|j| self.leq[j][i])).expect("validated")
    }

    pub fn minimum(&self) -> usize {
        (0..self.len()).find(|&i| (0..self.len()).all(|j| self.leq[i][j])).expect("validated")
    }

    /// DOT digraph with edges from larger to smaller orbits.
    pub fn to_dot(&self) -> String {
        let mut out = format!("digraph \"{}\" {{\n", self.group);
        for (i, node) in self.nodes.iter().enumerate() {
            out.push_str(&format!("  o{i} [label=\"{} (dim B = {})\"];\n", node.label, node.dim_springer));
        }
        for &(lo, hi) in &self.hasse {
            out.push_str(&format!("  o{hi} -> o{lo};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// The orbit poset of the group whose unipotent classes index the cells of `label`.
pub fn load_poset(label: TypeLabel) -> Result<OrbitPoset> {
    match label {
        TypeLabel::A1Affine => Ok(OrbitPoset::type_a(2)),
        TypeLabel::A2Affine | TypeLabel::A2 => Ok(OrbitPoset::type_a(3)),
        TypeLabel::A3 => Ok(OrbitPoset::type_a(4)),
        TypeLabel::C2Affine => OrbitPoset::from_json(C2_TABLE),
        TypeLabel::G2Affine => OrbitPoset::from_json(G2_TABLE),
    }
}

/// Pairing of two-sided cells with orbits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bijection {
    /// `cell_to_orbit[c]` is the orbit paired with cell `c`.
    pub cell_to_orbit: Vec<usize>,
}

impl Bijection {
    /// The same pairing with the orbits of two cells exchanged.
    pub fn swapped(&self, a: usize, b: usize) -> Bijection {
        let mut m = self.cell_to_orbit.clone();
        m.swap(a, b);
        Bijection { cell_to_orbit: m }
    }
}

/// Pairs each cell with the unique orbit whose Springer fibre dimension equals its a-value.
pub fn match_bijection(partition: &CellPartition, afn: &AFunctionTable, poset: &OrbitPoset) -> Result<Bijection> {
    let k = partition.n_cells();
    if k != poset.len() {
        return Err(Error::CountMismatch { cells: k, orbits: poset.len() });
    }
    let mut used = vec![false; poset.len()];
    let mut cell_to_orbit = Vec::with_capacity(k);
    for c in 0..k {
        let a = afn.require_certified(c)?;
        let hits: Vec<usize> = (0..poset.len()).filter(|&o| poset.nodes[o].dim_springer == a).collect();
        let [o] = hits[..] else {
            return Err(Error::Ambiguous(format!("cell {c} with a = {a} matches {} orbits", hits.len())));
        };
        if used[o] {
            return Err(Error::Ambiguous(format!("orbit {} matched twice", poset.nodes[o].label)));
        }
        used[o] = true;
        cell_to_orbit.push(o);
    }
    let e_cell = partition.cell_of(0);
    if cell_to_orbit[e_cell] != poset.maximum() {
        return Err(Error::Ambiguous("the cell of the identity is not paired with the regular orbit".into()));
    }
    Ok(Bijection { cell_to_orbit })
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderViolation {
    pub lower_cell: usize,
    pub upper_cell: usize,
    pub cells_related: bool,
    pub orbits_related: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderReport {
    pub pairs_checked: usize,
    pub identity_cell_regular: bool,
    pub violations: Vec<OrderViolation>,
}

impl OrderReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.identity_cell_regular
    }
}

/// Checks `c <= c'` iff `orbit(c) <= orbit(c')` over all ordered pairs of cells.
pub fn verify_order_preservation(mapping: &Bijection, partition: &CellPartition, poset: &OrbitPoset) -> OrderReport {
    let k = mapping.cell_to_orbit.len();
    let mut violations = Vec::new();
    for c in 0..k {
        for d in 0..k {
            let cells = partition.two_sided.leq(c, d);
            let orbits = poset.leq(mapping.cell_to_orbit[c], mapping.cell_to_orbit[d]);
            if cells != orbits {
                violations.push(OrderViolation { lower_cell: c, upper_cell: d, cells_related: cells, orbits_related: orbits });
            }
        }
    }
    OrderReport {
        pairs_checked: k * k,
        identity_cell_regular: mapping.cell_to_orbit.get(partition.cell_of(0)) == Some(&poset.maximum()),
        violations,
    }
}
