use klcells::cells::{self, CellPartition};
use klcells::hecke::t_mul;
use klcells::orbits::{self, OrbitPoset};
use klcells::{cache, Ball, CoxeterDatum, KLTable, LaurentPoly, TypeLabel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn table(t: TypeLabel, r: usize, ext: bool) -> KLTable {
    KLTable::compute(Ball::enumerate(&CoxeterDatum::new(t, ext), r).unwrap())
}

#[test]
fn structure_constants_respect_inversion() {
    // C_x C_y = sum h_{x,y,z} C_z implies C_{y^-1} C_{x^-1} = sum h_{x,y,z} C_{z^-1}
    for (t, r, ext) in [(TypeLabel::A2Affine, 8, false), (TypeLabel::A2Affine, 6, true), (TypeLabel::C2Affine, 7, false)] {
        let tab = table(t, r, ext);
        let ball = tab.ball();
        for x in 0..ball.len() {
            for y in 0..ball.len() {
                let Ok(row) = tab.h_row(x, y) else { continue };
                let mut mirrored: Vec<(usize, LaurentPoly)> =
                    tab.h_row(ball.inverse(y), ball.inverse(x)).unwrap().into_iter().map(|(z, h)| (ball.inverse(z), h)).collect();
                mirrored.sort_by_key(|(z, _)| *z);
                let mut row = row;
                row.sort_by_key(|(z, _)| *z);
                assert_eq!(row, mirrored, "{t} x={} y={}", ball.display(x), ball.display(y));
            }
        }
    }
}

#[test]
fn products_stay_below_their_factors() {
    for (t, r, ext) in [(TypeLabel::A2Affine, 8, false), (TypeLabel::A1Affine, 10, true), (TypeLabel::G2Affine, 9, false)] {
        let tab = table(t, r, ext);
        let p = CellPartition::compute(&tab);
        let ball = tab.ball();
        let mut checked = 0;
        for x in 0..ball.len() {
            for y in 0..ball.len() {
                let Ok(row) = tab.h_row(x, y) else { continue };
                for (z, _) in row {
                    checked += 1;
                    assert!(p.left.elem_leq(z, y), "{t}: z={} not left-below y={}", ball.display(z), ball.display(y));
                    assert!(p.right.elem_leq(z, x), "{t}: z={} not right-below x={}", ball.display(z), ball.display(x));
                }
            }
        }
        assert!(checked > 0);
    }
}

#[test]
fn structure_constants_match_t_basis_products() {
    let tab = table(TypeLabel::G2Affine, 10, false);
    let ball = tab.ball();
    let d = ball.datum().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut tested = 0;
    while tested < 60 {
        let x = rng.random_range(0..ball.len());
        let y = rng.random_range(0..ball.len());
        if ball.length(x) + ball.length(y) > tab.radius() {
            continue;
        }
        tested += 1;
        let product = t_mul(&d, &tab.c_basis_id(x), &tab.c_basis_id(y)).unwrap();
        let direct = tab.t_to_c(&product).unwrap();
        let via_h = tab.h_constants(&ball.element(x), &ball.element(y)).unwrap();
        assert_eq!(direct, via_h);
    }
}

#[test]
fn polynomials_survive_truncation() {
    let big = table(TypeLabel::C2Affine, 9, false);
    let small = table(TypeLabel::C2Affine, 6, false);
    let cut = big.truncate(6);
    assert_eq!(cache::render(&cut, false), cache::render(&small, false));
}

#[test]
fn cells_are_insensitive_to_cache_round_trip() {
    let tab = table(TypeLabel::A2Affine, 9, true);
    let back = cache::parse(&cache::render(&tab, false)).unwrap();
    let a = cells::export(&tab, &CellPartition::compute(&tab), None);
    let b = cells::export(&back, &CellPartition::compute(&back), None);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn finite_type_a_cells_follow_partitions() {
    // two-sided cells of S_n are indexed by partitions of n, with a = n(lambda)
    for (t, n) in [(TypeLabel::A2, 3), (TypeLabel::A3, 4)] {
        let tab = table(t, 12, false);
        assert!(tab.is_closed());
        let p = CellPartition::compute(&tab);
        let poset = OrbitPoset::type_a(n);
        assert_eq!(p.n_cells(), poset.len());
        let afn = klcells::AFunctionTable::compute(&tab, &p, None);
        let mut values: Vec<u32> = afn.cells().iter().map(|c| c.value).collect();
        let mut dims: Vec<u32> = orbits::partitions(n).iter().map(|l| orbits::partition_statistic(l)).collect();
        values.sort_unstable();
        dims.sort_unstable();
        assert_eq!(values, dims);
        // sizes are squares of the number of standard tableaux
        let mut sizes: Vec<usize> = (0..p.n_cells()).map(|c| p.two_sided.members(c).len()).collect();
        sizes.sort_unstable();
        let expected: Vec<usize> = if n == 3 { vec![1, 1, 4] } else { vec![1, 1, 4, 9, 9] };
        assert_eq!(sizes, expected);
    }
}

#[test]
fn shipped_orbit_tables_are_consistent() {
    for t in [TypeLabel::A1Affine, TypeLabel::A2Affine, TypeLabel::C2Affine, TypeLabel::G2Affine, TypeLabel::A3] {
        let poset = orbits::load_poset(t).unwrap();
        let top = poset.maximum();
        let bottom = poset.minimum();
        assert_eq!(poset.nodes[top].dim_springer, 0);
        for i in 0..poset.len() {
            assert!(poset.leq(i, top) && poset.leq(bottom, i));
            assert_eq!(poset.nodes[i].dim_orbit + 2 * poset.nodes[i].dim_springer, poset.nodes[top].dim_orbit);
        }
        assert_eq!(OrbitPoset::from_json(&poset.to_json()).unwrap().to_json(), poset.to_json());
    }
}
