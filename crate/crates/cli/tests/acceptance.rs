//! Acceptance gate: one pass/fail line per criterion, then a single assertion over all of them.
//!
//! All comparisons are exact. Time limits: criterion 1 under 60 s, whole run under 15 min.

use std::collections::HashMap;
use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use klcells::asymptotic::CellRing;
use klcells::cells::{self, AFunctionTable, CellPartition};
use klcells::hecke::bar_involution;
use klcells::orbits;
use klcells::{Ball, CoxeterDatum, KLTable, LaurentPoly, TypeLabel};

const CRITERION_1_LIMIT: Duration = Duration::from_secs(60);
const PIPELINE_LIMIT: Duration = Duration::from_secs(15 * 60);
const PHI_SEED: u64 = 42;
const PHI_SAMPLES: usize = 200;

struct Setup {
    table: KLTable,
    partition: CellPartition,
    afn: AFunctionTable,
}

fn setup(t: TypeLabel, radius: usize) -> Setup {
    let table = KLTable::compute(Ball::enumerate(&CoxeterDatum::new(t, false), radius).unwrap());
    let partition = CellPartition::compute(&table);
    let poset = orbits::load_poset(t).unwrap();
    let dims: Vec<u32> = poset.nodes.iter().map(|n| n.dim_springer).collect();
    let afn = AFunctionTable::compute(&table, &partition, Some(&dims));
    Setup { table, partition, afn }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut checked = 0;
    for (t, max_len) in [(TypeLabel::A2Affine, 8), (TypeLabel::A1Affine, 12)] {
        let table = KLTable::compute(Ball::enumerate(&CoxeterDatum::new(t, false), max_len).unwrap());
        let d = table.ball().datum().clone();
        for id in 0..table.ball().len() {
            let c = table.c_basis_id(id);
            checked += 1;
            if bar_involution(&d, &c).unwrap() != c {
                bad.push(format!("{t} bar {}", table.ball().display(id)));
            }
            let c_basis = klcells::HeckeElt::basis_element(klcells::Basis::C, table.ball().element(id));
            let round = table.t_to_c(&table.c_to_t(&c_basis).unwrap()).unwrap();
            if round != c_basis {
                bad.push(format!("{t} round trip {}", table.ball().display(id)));
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        bad.is_empty() && elapsed < CRITERION_1_LIMIT,
        format!("{checked} elements, {} failures, {:.1}s (limit 60s)", bad.len(), elapsed.as_secs_f64()),
    )
}

fn criterion_2(a1: &Setup, a2: &Setup) -> Outcome {
    let mut p_checked = 0usize;
    let mut h_checked = 0usize;
    let mut bad = Vec::new();
    for s in [a1, a2] {
        let t = &s.table;
        let ball = t.ball();
        let n0 = ball.datum().n_positive_roots() as i32;
        for (y, w, p) in t.core_polynomials() {
            p_checked += 1;
            if !p.has_nonnegative_coefficients() {
                bad.push(format!("negative coefficient in P({y},{w})"));
            }
            if y != w {
                let gap = (ball.core_length(w) - ball.core_length(y)) as i32;
                if p.degree().unwrap() > (gap - 1) / 2 {
                    bad.push(format!("degree bound fails for P({y},{w})"));
                }
            }
        }
        for y in 0..ball.core_count() {
            for x in 0..t.left_factors(y) {
                for (z, h) in t.core_h_row(x, y).unwrap() {
                    h_checked += 1;
                    if !h.is_bar_invariant() || h.degree().unwrap() > n0 || !h.has_nonnegative_coefficients() {
                        bad.push(format!("h({x},{y},{z}) = {h}"));
                    }
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{p_checked} polynomials, {h_checked} structure constants, {} failures", bad.len()))
}

// S4 as permutations of 0..4 acting on positions; s_i swaps i-1 and i.
type Perm = [u8; 4];

fn perm_len(p: &Perm) -> usize {
    (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count()
}

fn left_gen(i: usize, p: &Perm) -> Perm {
    // s_i * p: swap the values i-1 and i
    p.map(|v| if v as usize == i - 1 { i as u8 } else if v as usize == i { (i - 1) as u8 } else { v })
}

fn perm_of_word(word: &[usize]) -> Perm {
    let mut p: Perm = [0, 1, 2, 3];
    for &i in word.iter().rev() {
        p = left_gen(i, &p);
    }
    p
}

type TElt = HashMap<Perm, LaurentPoly>;

fn add(e: &mut TElt, p: Perm, c: &LaurentPoly) {
    let entry = e.entry(p).or_default();
    *entry += c;
    if entry.is_zero() {
        e.remove(&p);
    }
}

fn mono(k: i32, c: i64) -> LaurentPoly {
    LaurentPoly::from_i64_terms([(k, c)])
}

// T_s^{-1} * h with T_s^{-1} = v^-2 T_s + (v^-2 - 1) T_e
fn inv_gen_times(i: usize, h: &TElt) -> TElt {
    let mut out = TElt::new();
    for (w, c) in h {
        let sw = left_gen(i, w);
        let tsw: Vec<(Perm, LaurentPoly)> = if perm_len(&sw) > perm_len(w) {
            vec![(sw, LaurentPoly::one())]
        } else {
            vec![(sw, mono(2, 1)), (*w, mono(2, 1) - LaurentPoly::one())]
        };
        for (p, a) in tsw {
            add(&mut out, p, &(c * &a * mono(-2, 1)));
        }
        add(&mut out, *w, &(c * &(mono(-2, 1) - LaurentPoly::one())));
    }
    out
}

fn all_perms() -> Vec<(Vec<usize>, Perm)> {
    // breadth-first by length with a reduced word for each element
    let mut seen: HashMap<Perm, Vec<usize>> = HashMap::new();
    let mut frontier = vec![(Vec::new(), [0u8, 1, 2, 3])];
    seen.insert([0, 1, 2, 3], Vec::new());
    let mut out = frontier.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (word, p) in &frontier {
            for i in 1..4 {
                let q = left_gen(i, p);
                if perm_len(&q) > perm_len(p) && !seen.contains_key(&q) {
                    let mut w = vec![i];
                    w.extend(word);
                    seen.insert(q, w.clone());
                    next.push((w, q));
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// `P_{y,w}` as a polynomial in q for all pairs of S4, by solving `bar(C_w) = C_w` directly.
fn bar_solver_s4() -> HashMap<(Perm, Perm), LaurentPoly> {
    let elems = all_perms();
    let len: HashMap<Perm, usize> = elems.iter().map(|(_, p)| (*p, perm_len(p))).collect();
    // bar(T_x) = T_{s_1}^{-1} ... T_{s_k}^{-1} for a reduced word s_1...s_k of x
    let mut bar: HashMap<Perm, TElt> = HashMap::new();
    for (word, x) in &elems {
        let mut h = TElt::new();
        h.insert([0, 1, 2, 3], LaurentPoly::one());
        for &i in word.iter().rev() {
            h = inv_gen_times(i, &h);
        }
        bar.insert(*x, h);
    }
    // normalized matrix: bar(v^-l(x) T_x) = sum_y r[y][x] v^-l(y) T_y, unitriangular
    let r = |y: &Perm, x: &Perm| -> LaurentPoly {
        bar[x].get(y).map(|c| c.shift(len[x] as i32 + len[y] as i32)).unwrap_or_default()
    };
    let mut out = HashMap::new();
    for (_, w) in &elems {
        // c[y] with C_w = sum c[y] v^-l(y) T_y, c[w] = 1, c[y] in v^-1 Z[v^-1]
        let mut c: HashMap<Perm, LaurentPoly> = HashMap::new();
        c.insert(*w, LaurentPoly::one());
        let mut below: Vec<&Perm> = elems.iter().map(|(_, p)| p).filter(|p| len[*p] < len[w]).collect();
        below.sort_by_key(|p| std::cmp::Reverse(len[*p]));
        for y in below {
            let mut rhs = LaurentPoly::zero();
            for (x, cx) in &c {
                rhs += &(r(y, x) * cx.bar());
            }
            // c - bar(c) = rhs - r[y][y] bar(c) with r[y][y] = 1; keep negative powers
            let neg = LaurentPoly::from_terms(rhs.terms().iter().filter(|(e, _)| *e < 0).cloned());
            if !neg.is_zero() {
                c.insert(*y, neg);
            }
        }
        for (y, cy) in c {
            let gap = (len[w] - len[&y]) as i32;
            let p = cy.shift(gap).contract(2).expect("even exponents");
            out.insert((y, *w), p);
        }
    }
    out
}

fn criterion_3() -> Outcome {
    let table = KLTable::compute(Ball::enumerate(&CoxeterDatum::new(TypeLabel::A3, false), 6).unwrap());
    let d = table.ball().datum().clone();
    let to_idx = |labels: &[u32]| -> Vec<usize> { labels.iter().map(|&l| d.gen_index(l).unwrap()).collect() };
    let y = d.from_word(&to_idx(&[2])).unwrap();
    let w = d.from_word(&to_idx(&[2, 1, 3, 2])).unwrap();
    let expected = LaurentPoly::from_i64_terms([(0, 1), (1, 1)]);
    let via_recursion = table.kl_polynomial(&y, &w).unwrap();
    let oracle = bar_solver_s4();
    let via_solver = oracle[&(perm_of_word(&[2]), perm_of_word(&[2, 1, 3, 2]))].clone();
    // the two methods also agree on every pair of S4
    let ball = table.ball();
    let mut disagreements = 0;
    for wid in 0..ball.core_count() {
        let labels_w: Vec<usize> = ball.core_word(wid).iter().map(|&s| d.gen_label(s) as usize).collect();
        for yid in 0..ball.core_count() {
            let labels_y: Vec<usize> = ball.core_word(yid).iter().map(|&s| d.gen_label(s) as usize).collect();
            let solved = oracle.get(&(perm_of_word(&labels_y), perm_of_word(&labels_w))).cloned().unwrap_or_default();
            if solved != table.core_p(yid, wid) {
                disagreements += 1;
            }
        }
    }
    outcome(
        via_recursion == expected && via_solver == expected && disagreements == 0,
        format!("P in q: recursion {via_recursion}, solver {via_solver}, {disagreements} of 576 S4 pairs disagree"),
    )
}

fn criterion_4(a1: &Setup, a2: &Setup) -> Outcome {
    let values = |s: &Setup| s.afn.cells().iter().map(|c| c.value).collect::<Vec<_>>();
    let a1_ok = a1.partition.n_cells() == 2 && a1.partition.two_sided.members(0) == [0] && values(a1) == [0, 1];
    let a2_ok = a2.partition.n_cells() == 3 && values(a2) == [0, 1, 3];
    let st1 = cells::stabilization(&a1.table, &a1.partition);
    let st2 = cells::stabilization(&a2.table, &a2.partition);
    outcome(
        a1_ok && a2_ok && st1.stable && st2.stable,
        format!(
            "A1~ r{}: {} cells a={:?} stable={}; A2~ r{}: {} cells a={:?} stable={}",
            a1.table.radius(),
            a1.partition.n_cells(),
            values(a1),
            st1.stable,
            a2.table.radius(),
            a2.partition.n_cells(),
            values(a2),
            st2.stable
        ),
    )
}

fn criterion_5(a1: &Setup, a2: &Setup) -> Outcome {
    let mut violations = 0;
    let mut checked = 0;
    for s in [a1, a2] {
        for c in 0..s.partition.n_cells() {
            let r = cells::verify_ideal_closure(&s.table, &s.partition, c);
            violations += r.violations.len();
            checked += r.products_checked;
        }
    }
    outcome(violations == 0 && checked > 0, format!("{checked} products checked, {violations} violations"))
}

fn criterion_6(a1: &Setup, a2: &Setup, a2_large: &Setup) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    // A1~: every pair with l(x) + l(y) <= 10, for both cells
    let ball = a1.table.ball();
    let pairs: Vec<(usize, usize)> = (0..ball.len())
        .flat_map(|x| (0..ball.len()).map(move |y| (x, y)))
        .filter(|&(x, y)| ball.length(x) + ball.length(y) <= 10)
        .collect();
    for c in 0..a1.partition.n_cells() {
        let ring = CellRing::new(&a1.table, &a1.partition, &a1.afn, c).unwrap();
        let r = ring.verify_phi_pairs(&a1.afn, &pairs);
        let k = ring.verify_kills_lower(&a1.afn);
        ok &= r.passed() && r.skipped == 0 && r.checked == pairs.len() && k.passed();
        notes.push(format!("A1~ cell {c}: {}/{} pairs, kills lower {}/{}", r.checked, pairs.len(), k.checked, k.failures.len()));
    }
    // A2~: seeded samples; the lowest cell needs a larger ball since its involutions reach length 5
    for (s, c) in [(a2, 0), (a2, 1), (a2_large, 2)] {
        let ring = CellRing::new(&s.table, &s.partition, &s.afn, c).unwrap();
        let r = ring.verify_phi_homomorphism(&s.afn, PHI_SAMPLES, PHI_SEED);
        let k = ring.verify_kills_lower(&s.afn);
        let want = PHI_SAMPLES.min(r.eligible_pairs);
        ok &= r.passed() && r.checked == want && r.skipped == 0 && k.passed();
        notes.push(format!(
            "A2~ r{} cell {c}: {} pairs (seed {PHI_SEED}), {} failures, kills lower on {} elements",
            s.table.radius(),
            r.checked,
            r.failures.len(),
            k.checked
        ));
    }
    // the lowest cell of the large ball must still see 200 pairs
    ok &= CellRing::new(&a2_large.table, &a2_large.partition, &a2_large.afn, 2).unwrap().eligible_pairs().len() >= PHI_SAMPLES;
    outcome(ok, notes.join("; "))
}

fn criterion_7(a1: &Setup, a2: &Setup) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, s, c) in [("A1~ big cell", a1, 1usize), ("A2~ middle cell", a2, 1)] {
        let ring = CellRing::new(&s.table, &s.partition, &s.afn, c).unwrap();
        let asc = ring.verify_associativity();
        let unit = ring.verify_unit();
        let pos = ring.verify_gamma_positive();
        ok &= asc.passed() && unit.passed() && pos.passed() && asc.checked > 0 && unit.checked > 0;
        let d: Vec<String> = ring.involutions().iter().map(|&i| s.table.ball().display(i)).collect();
        notes.push(format!(
            "{name}: {} triples, unit on {} members with D = {{{}}}, {} gamma rows nonnegative",
            asc.checked,
            unit.checked,
            d.join("; "),
            pos.checked
        ));
    }
    outcome(ok, notes.join("; "))
}

fn criterion_8(a1: &Setup, a2: &Setup) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (t, s) in [(TypeLabel::A1Affine, a1), (TypeLabel::A2Affine, a2)] {
        let poset = orbits::load_poset(t).unwrap();
        match orbits::match_bijection(&s.partition, &s.afn, &poset) {
            Ok(m) => {
                let r = orbits::verify_order_preservation(&m, &s.partition, &poset);
                let control = orbits::verify_order_preservation(&m.swapped(0, 1), &s.partition, &poset);
                let e_regular = m.cell_to_orbit[s.partition.cell_of(0)] == poset.maximum();
                ok &= r.passed() && !control.passed() && e_regular;
                notes.push(format!(
                    "{t}: order preserved={}, identity cell -> {}, shuffle rejected={}",
                    r.passed(),
                    poset.nodes[m.cell_to_orbit[0]].label,
                    !control.passed()
                ));
            }
            Err(e) => {
                ok = false;
                notes.push(format!("{t}: {e}"));
            }
        }
    }
    outcome(ok, notes.join("; "))
}

fn criterion_9(pipeline_start: Instant) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_klcells");
    let mut bytes = Vec::new();
    for name in ["first.klc", "second.klc"] {
        let path = dir.path().join(name);
        let status = Command::new(bin)
            .args(["compute", "--type", "A2~", "--radius", "10", "--cache"])
            .arg(&path)
            .output()
            .unwrap();
        assert!(status.status.success());
        bytes.push(std::fs::read(&path).unwrap());
    }
    let identical = bytes[0] == bytes[1] && !bytes[0].is_empty();
    let elapsed = pipeline_start.elapsed();
    outcome(
        identical && elapsed < PIPELINE_LIMIT,
        format!(
            "caches identical={identical} ({} bytes), pipeline {:.1}s (limit 900s)",
            bytes[0].len(),
            elapsed.as_secs_f64()
        ),
    )
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let mut results = Vec::new();
    results.push((1, criterion_1()));
    let a1 = setup(TypeLabel::A1Affine, 12);
    let a2 = setup(TypeLabel::A2Affine, 10);
    let a2_large = setup(TypeLabel::A2Affine, 16);
    results.push((2, criterion_2(&a1, &a2)));
    results.push((3, criterion_3()));
    results.push((4, criterion_4(&a1, &a2)));
    results.push((5, criterion_5(&a1, &a2)));
    results.push((6, criterion_6(&a1, &a2, &a2_large)));
    results.push((7, criterion_7(&a1, &a2)));
    results.push((8, criterion_8(&a1, &a2)));
    results.push((9, criterion_9(start)));
    // written to the raw handle so the lines survive the harness's output capture
    let mut err = std::io::stderr().lock();
    for (n, o) in &results {
        let _ = writeln!(err, "criterion {n}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    let failed: Vec<usize> = results.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
