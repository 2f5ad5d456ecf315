use std::fs;
use std::path::Path;

use klcells::asymptotic::{CellRing, CheckReport, PhiReport};
use klcells::cells::{self, AFunctionTable, CellPartition, IdealReport, PartitionExport, Stabilization};
use klcells::orbits::{self, Bijection, OrderReport};
use klcells::{cache, Ball, CoxeterDatum, Error, KLTable, TypeLabel};
use serde::Serialize;
use serde_json::{json, Value};

/// Exit status of a command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Verified,
    Counterexample,
    Insufficient,
    Usage,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Verified => 0,
            Outcome::Counterexample => 2,
            Outcome::Insufficient => 3,
            Outcome::Usage => 4,
        }
    }

    fn worst(self, other: Outcome) -> Outcome {
        if other.code() > self.code() {
            other
        } else {
            self
        }
    }
}

pub struct Failure {
    pub outcome: Outcome,
    pub error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let outcome = match &error {
            Error::Uncertified(_)
            | Error::BallExceeded { .. }
            | Error::BallTooLarge { .. }
            | Error::CountMismatch { .. }
            | Error::Ambiguous(_)
            | Error::NotInBall => Outcome::Insufficient,
            Error::MixedCells(_) => Outcome::Counterexample,
            _ => Outcome::Usage,
        };
        Failure { outcome, error }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { outcome: Outcome::Usage, error: Error::Io(e) }
    }
}

type CmdResult = Result<(Value, Outcome), Failure>;

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report serializes")
}

fn verdict(ok: bool, otherwise: Outcome) -> Outcome {
    if ok {
        Outcome::Verified
    } else {
        otherwise
    }
}

/// A loaded table with its cells and a-values, certified against the orbit table of its type.
struct Context {
    table: KLTable,
    partition: CellPartition,
    afn: AFunctionTable,
}

impl Context {
    fn load(path: &Path) -> Result<Context, Failure> {
        let table = cache::read_cache(path)?;
        let partition = CellPartition::compute(&table);
        let poset = orbits::load_poset(table.ball().datum().label())?;
        let dims: Vec<u32> = poset.nodes.iter().map(|n| n.dim_springer).collect();
        let afn = AFunctionTable::compute(&table, &partition, Some(&dims));
        Ok(Context { table, partition, afn })
    }

    fn header(&self) -> Value {
        let d = self.table.ball().datum();
        json!({
            "type": d.label().as_str(),
            "radius": self.table.radius(),
            "extended": d.is_extended(),
            "elements": self.table.ball().len(),
        })
    }

    fn cell_of_word(&self, word: &str) -> Result<usize, Failure> {
        let d = self.table.ball().datum();
        let w = d.from_word(&d.parse_word(word)?)?;
        let id = self.table.ball().id_of(&w).ok_or(Error::NotInBall)?;
        Ok(self.partition.cell_of(id))
    }
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

pub fn compute(label: &str, radius: usize, extended: bool, path: &Path) -> CmdResult {
    let datum = CoxeterDatum::parse(label, extended)?;
    let ball = Ball::enumerate(&datum, radius)?;
    let table = KLTable::compute(ball);
    let written = cache::write_cache(&table, path, false)?;
    let report = json!({
        "command": "compute",
        "type": datum.label().as_str(),
        "radius": radius,
        "extended": extended,
        "elements": table.ball().len(),
        "polynomials": table.core_polynomials().count(),
        "written": written,
    });
    Ok((report, Outcome::Verified))
}

#[derive(Serialize)]
struct CellChecks {
    left_and_right_cells_refine_two_sided: bool,
    inverse_invariant: bool,
    identity_cell_maximal: bool,
}

pub fn cells(path: &Path, dot: Option<&Path>) -> CmdResult {
    let cx = Context::load(path)?;
    let ball = cx.table.ball();
    let p = &cx.partition;
    let checks = CellChecks {
        left_and_right_cells_refine_two_sided: p.unions_consistent(),
        inverse_invariant: (0..ball.len()).all(|id| p.cell_of(id) == p.cell_of(ball.inverse(id)))
            && p.left.len() == p.right.len()
            && (0..p.left.len()).all(|l| {
                let m = p.left.members(l);
                m.iter().all(|&id| p.right.class_of(ball.inverse(id)) == p.right.class_of(ball.inverse(m[0])))
            }),
        identity_cell_maximal: (0..ball.len()).all(|id| p.two_sided.elem_leq(id, 0)),
    };
    let stab: Stabilization = cells::stabilization(&cx.table, p);
    let export: PartitionExport = cells::export(&cx.table, p, Some(&cx.afn));
    if let Some(dot) = dot {
        fs::write(dot, cells::to_dot(&cx.table, p, Some(&cx.afn)))?;
    }
    let ok = checks.left_and_right_cells_refine_two_sided && checks.inverse_invariant && checks.identity_cell_maximal;
    let outcome = verdict(ok, Outcome::Counterexample).worst(verdict(stab.stable, Outcome::Insufficient));
    let report = merge(
        json!({ "command": "cells" }),
        merge(
            cx.header(),
            json!({
                "two_sided_cells": p.n_cells(),
                "left_cells": p.left.len(),
                "right_cells": p.right.len(),
                "a_values": cx.afn.cells().iter().map(|c| c.value).collect::<Vec<_>>(),
                "checks": to_value(&checks),
                "stabilization": to_value(&stab),
                "partition": to_value(&export),
            }),
        ),
    );
    Ok((report, outcome))
}

pub fn afn(path: &Path) -> CmdResult {
    let cx = Context::load(path)?;
    let ball = cx.table.ball();
    let bound = cx.afn.bound();
    let within_bound = (0..ball.len()).all(|id| cx.afn.value(id) <= bound);
    let identity_zero = cx.afn.get(0) == (0, true);
    let order_reversing = cx.afn.order_reversing(&cx.partition);
    let certified_elements = (0..ball.len()).filter(|&id| cx.afn.is_certified(id)).count();
    let cells: Vec<Value> = (0..cx.partition.n_cells())
        .map(|c| {
            let members = cx.partition.two_sided.members(c);
            json!({
                "cell": c,
                "representative": ball.display(members[0]),
                "size": members.len(),
                "a": to_value(cx.afn.cell(c)),
                "certified_members": members.iter().filter(|&&id| cx.afn.is_certified(id)).count(),
            })
        })
        .collect();
    let ok = within_bound && identity_zero && order_reversing;
    let outcome = verdict(ok, Outcome::Counterexample).worst(verdict(cx.afn.all_cells_certified(), Outcome::Insufficient));
    let report = merge(
        json!({ "command": "afn" }),
        merge(
            cx.header(),
            json!({
                "bound": bound,
                "cells": cells,
                "certified_elements": certified_elements,
                "checks": {
                    "within_bound": within_bound,
                    "identity_zero": identity_zero,
                    "order_reversing": order_reversing,
                },
            }),
        ),
    );
    Ok((report, outcome))
}

pub fn verify_ideal(path: &Path, rep: &str) -> CmdResult {
    let cx = Context::load(path)?;
    let c = cx.cell_of_word(rep)?;
    let report: IdealReport = cells::verify_ideal_closure(&cx.table, &cx.partition, c);
    let outcome = verdict(report.passed(), Outcome::Counterexample);
    let out = merge(
        json!({ "command": "verify ideal", "cell_rep": rep }),
        merge(cx.header(), json!({ "passed": report.passed(), "report": to_value(&report) })),
    );
    Ok((out, outcome))
}

pub fn verify_phi(path: &Path, rep: &str, samples: usize, seed: u64) -> CmdResult {
    let cx = Context::load(path)?;
    let c = cx.cell_of_word(rep)?;
    let ring = CellRing::new(&cx.table, &cx.partition, &cx.afn, c)?;
    let phi: PhiReport = ring.verify_phi_homomorphism(&cx.afn, samples, seed);
    let unit: CheckReport = ring.verify_unit();
    let kills: CheckReport = ring.verify_kills_lower(&cx.afn);
    let ok = phi.passed() && unit.passed() && kills.passed();
    let enough = phi.eligible_pairs > 0 && phi.checked > 0;
    let outcome = verdict(ok, Outcome::Counterexample).worst(verdict(enough, Outcome::Insufficient));
    let ball = cx.table.ball();
    let out = merge(
        json!({ "command": "verify phi", "cell_rep": rep, "samples": samples, "seed": seed }),
        merge(
            cx.header(),
            json!({
                "passed": ok && enough,
                "cell": c,
                "a": ring.a_value(),
                "distinguished_involutions": ring.involutions().iter().map(|&d| ball.display(d)).collect::<Vec<_>>(),
                "homomorphism": to_value(&phi),
                "unit": to_value(&unit),
                "kills_lower_cells": to_value(&kills),
            }),
        ),
    );
    Ok((out, outcome))
}

pub fn bijection(label: &str, path: &Path) -> CmdResult {
    let wanted: TypeLabel = label.parse()?;
    let text = fs::read_to_string(path)?;
    let header = cache::read_header(&text)?;
    if header.label != wanted.as_str() {
        return Err(Error::Format(format!("cache holds type {} but {} was requested", header.label, wanted)).into());
    }
    let cx = Context::load(path)?;
    let poset = orbits::load_poset(wanted)?;
    let mapping: Bijection = orbits::match_bijection(&cx.partition, &cx.afn, &poset)?;
    let order: OrderReport = orbits::verify_order_preservation(&mapping, &cx.partition, &poset);
    // a pairing with the first two cells exchanged must be rejected by the checker
    let control_rejected = mapping.cell_to_orbit.len() < 2
        || !orbits::verify_order_preservation(&mapping.swapped(0, 1), &cx.partition, &poset).passed();
    let ball = cx.table.ball();
    let pairs: Vec<Value> = mapping
        .cell_to_orbit
        .iter()
        .enumerate()
        .map(|(c, &o)| {
            json!({
                "cell": c,
                "representative": ball.display(cx.partition.two_sided.members(c)[0]),
                "a": cx.afn.cell(c).value,
                "orbit": poset.nodes[o].label,
                "dim_springer": poset.nodes[o].dim_springer,
            })
        })
        .collect();
    let ok = order.passed() && control_rejected;
    let out = merge(
        json!({ "command": "bijection" }),
        merge(
            cx.header(),
            json!({
                "passed": ok,
                "group": poset.group,
                "pairs": pairs,
                "order": to_value(&order),
                "negative_control_rejected": control_rejected,
            }),
        ),
    );
    Ok((out, verdict(ok, Outcome::Counterexample)))
}
