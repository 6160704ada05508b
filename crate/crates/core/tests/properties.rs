//! Randomized invariants across modules.

use modrep::diffop::{serre_apply, SerreOp};
use modrep::dualnum::DualRing;
use modrep::gf::{binom_mod, Fe, Level, Tower};
use modrep::grp::{torus_embed, Group, GroupElem};
use modrep::poly::{profile_dim, twisted_point, MultiPoly};
use modrep::psmaps::{min_degree, PsConfig};
use modrep::rep::{Datum, InducedSpace};
use modrep::report::Report;
use modrep::theta::{dickson, evaluation_matrix, ideal, twisted_dickson};
use modrep::Error;
use proptest::prelude::*;
use std::sync::OnceLock;

struct Fixture {
    tower: Tower,
    group: Group,
}

fn fixtures() -> &'static [Fixture] {
    static F: OnceLock<Vec<Fixture>> = OnceLock::new();
    F.get_or_init(|| {
        [(3, 1), (5, 1), (3, 2)]
            .into_iter()
            .map(|(p, f)| {
                let tower = Tower::new(p, f).unwrap();
                let group = Group::new(&tower).unwrap();
                Fixture { tower, group }
            })
            .collect()
    })
}

fn level(i: usize) -> Level {
    [Level::Base, Level::Mid, Level::Top][i % 3]
}

fn elem(t: &Tower, lv: Level, seed: usize) -> Fe {
    let xs = t.elements(lv);
    xs[seed % xs.len()]
}

fn poly_from(t: &Tower, profile: &[usize], seeds: &[usize]) -> MultiPoly {
    let fq = t.fq();
    let coeffs = (0..profile_dim(profile)).map(|i| fq[seeds[i % seeds.len()].wrapping_mul(i + 1) % fq.len()]).collect();
    MultiPoly::from_coeffs(profile, coeffs).unwrap()
}

fn group_elem(fx: &Fixture, seed: usize) -> GroupElem {
    fx.group.elements()[seed % fx.group.order()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn field_axioms(which in 0usize..3, lv in 0usize..3, a in any::<usize>(), b in any::<usize>(), c in any::<usize>()) {
        let t = &fixtures()[which].tower;
        let (x, y, z) = (elem(t, level(lv), a), elem(t, level(lv), b), elem(t, level(lv), c));
        prop_assert_eq!(t.mul(t.mul(x, y), z), t.mul(x, t.mul(y, z)));
        prop_assert_eq!(t.add(t.add(x, y), z), t.add(x, t.add(y, z)));
        prop_assert_eq!(t.mul(x, t.add(y, z)), t.add(t.mul(x, y), t.mul(x, z)));
        prop_assert_eq!(t.add(x, t.neg(x)), 0);
        if x != 0 {
            prop_assert_eq!(t.mul(x, t.inv(x).unwrap()), 1);
            prop_assert!(t.in_level(t.inv(x).unwrap(), level(lv)));
        }
        prop_assert!(t.in_level(t.mul(x, y), level(lv)) && t.in_level(t.add(x, y), level(lv)));
    }

    #[test]
    fn frobenius_is_a_field_map(which in 0usize..3, a in any::<usize>(), b in any::<usize>(), i in 0i64..4) {
        let t = &fixtures()[which].tower;
        let (x, y) = (elem(t, Level::Top, a), elem(t, Level::Top, b));
        prop_assert_eq!(t.frobenius(t.mul(x, y), i), t.mul(t.frobenius(x, i), t.frobenius(y, i)));
        prop_assert_eq!(t.frobenius(t.add(x, y), i), t.add(t.frobenius(x, i), t.frobenius(y, i)));
        prop_assert_eq!(t.frobenius(x, 1), t.pow(x, t.p() as u64));
    }

    #[test]
    fn left_action_law(which in 0usize..3, g in any::<usize>(), h in any::<usize>(), s in prop::collection::vec(any::<usize>(), 4)) {
        let fx = &fixtures()[which];
        let t = &fx.tower;
        let profile: Vec<usize> = (0..t.f()).map(|j| 3 + (s[0] >> j) % 3).collect();
        let p = poly_from(t, &profile, &s);
        let (g, h) = (group_elem(fx, g), group_elem(fx, h));
        let lhs = p.substitute_linear(t, &h).unwrap().substitute_linear(t, &g).unwrap();
        let rhs = p.substitute_linear(t, &g.mul(t, &h)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution_matches_moved_point(which in 0usize..3, g in any::<usize>(), c in any::<usize>(), d in any::<usize>(), s in prop::collection::vec(any::<usize>(), 4)) {
        let fx = &fixtures()[which];
        let t = &fx.tower;
        let f = t.f();
        let profile: Vec<usize> = (0..f).map(|j| 2 + (s[1] >> j) % 4).collect();
        let p = poly_from(t, &profile, &s);
        let g = group_elem(fx, g);
        let (c, d) = (elem(t, Level::Mid, c), elem(t, Level::Mid, d));
        // g·P = P(aX + cY, bX + dY), evaluated at (c, d).
        let moved = (t.add(t.mul(g.a, c), t.mul(g.c, d)), t.add(t.mul(g.b, c), t.mul(g.d, d)));
        let lhs = p.substitute_linear(t, &g).unwrap().evaluate(t, &twisted_point(t, f, c, d)).unwrap();
        let rhs = p.evaluate(t, &twisted_point(t, f, moved.0, moved.1)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn torus_determinant_is_norm(which in 0usize..2, a in any::<usize>()) {
        let t = &fixtures()[which].tower;
        let x = elem(t, Level::Top, a);
        prop_assume!(x != 0);
        let g = torus_embed(t, x).unwrap();
        prop_assert_eq!(g.det(t), t.mul(x, t.pow(x, t.q() as u64)));
    }

    #[test]
    fn bruhat_cosets_are_disjoint(which in 0usize..3, g in any::<usize>()) {
        let fx = &fixtures()[which];
        let t = &fx.tower;
        let g = group_elem(fx, g);
        let hits = fx.group.borel_coset_reps().iter().filter(|w| g.mul(t, &w.inv(t)).is_borel()).count();
        prop_assert_eq!(hits, 1);
        let (b, i) = fx.group.factor_borel(t, &g);
        prop_assert!(b.is_borel());
        prop_assert_eq!(b.mul(t, &fx.group.borel_coset_reps()[i]), g);
    }

    #[test]
    fn ideal_is_g_stable(which in 0usize..3, g in any::<usize>(), s in prop::collection::vec(any::<usize>(), 4)) {
        let fx = &fixtures()[which];
        let t = &fx.tower;
        let f = t.f();
        let (profile, gen) = if f == 1 {
            (vec![t.p() as usize + 1 + 4], dickson(t))
        } else {
            (vec![10, 4], twisted_dickson(t, f, 1).unwrap())
        };
        let rest: Vec<usize> = profile.iter().zip(gen.profile()).map(|(a, b)| a - b).collect();
        let elt = gen.multiply(t, &poly_from(t, &rest, &s)).unwrap();
        let id = ideal(t, &profile, &vec![1; f]).unwrap();
        prop_assert!(id.member(t, &elt).unwrap());
        prop_assert!(id.member(t, &elt.substitute_linear(t, &group_elem(fx, g)).unwrap()).unwrap());
    }

    #[test]
    fn membership_matches_vanishing(which in 0usize..3, s in prop::collection::vec(any::<usize>(), 4), zero_out in any::<bool>()) {
        let fx = &fixtures()[which];
        let t = &fx.tower;
        let f = t.f();
        let profile = if f == 1 { vec![9 + s[0] % 5] } else { vec![9 + s[0] % 3, 3 + s[1] % 3] };
        let mut p = poly_from(t, &profile, &s);
        if zero_out {
            p = dickson_multiple(t, &profile, &s);
        }
        let id = ideal(t, &profile, &vec![1; f]).unwrap();
        let values = evaluation_matrix(t, &profile).mul_vec(t, p.coeffs());
        prop_assert_eq!(id.member(t, &p).unwrap(), values.iter().all(|&v| v == 0));
    }

    #[test]
    fn bad_binomial_iff_p_divides(p in prop::sample::select(vec![3u64, 5, 7]), r in 0usize..40, m in 0usize..7) {
        prop_assume!(m as u64 <= p - 1 && m <= r && r >= min_degree(p, m));
        let res = PsConfig::new(p, &[r], &[m]).validate();
        let divides = binom_mod(r as u64, m as u64, p as u32) == 0;
        prop_assert_eq!(matches!(res, Err(Error::BadBinomial { .. })), divides);
        if !divides {
            prop_assert!(res.is_ok());
        }
    }

    #[test]
    fn serre_operator_degree(which in 0usize..2, r in 0usize..12, s in prop::collection::vec(any::<usize>(), 4)) {
        let t = &fixtures()[which].tower;
        let p = poly_from(t, &[r], &s);
        let d = serre_apply(t, SerreOp::Classical, &p).unwrap();
        prop_assert_eq!(d.profile(), &[r + t.q() as usize - 1][..]);
    }

    #[test]
    fn dual_ring_laws(p in prop::sample::select(vec![3u64, 5]), m in 1usize..3, a in any::<usize>(), b in any::<usize>(), c in any::<usize>()) {
        let ring = DualRing::new(p, m).unwrap();
        let els = ring.elements();
        let (x, y, z) = (&els[a % els.len()], &els[b % els.len()], &els[c % els.len()]);
        prop_assert_eq!(ring.mul(&ring.mul(x, y), z), ring.mul(x, &ring.mul(y, z)));
        prop_assert_eq!(ring.mul(x, &ring.add(y, z)), ring.add(&ring.mul(x, y), &ring.mul(x, z)));
        prop_assert_eq!(ring.pow(&ring.eps(), m as u64 + 1), ring.zero());
        prop_assert_eq!(ring.is_unit(x), x[0] != 0);
    }

    #[test]
    fn report_round_trip(names in prop::collection::vec("[a-z_]{1,8}", 1..6), passes in prop::collection::vec(any::<bool>(), 6), d in any::<u16>()) {
        let mut r = Report::new("prop");
        r.param("seed", d);
        for (n, &ok) in names.iter().zip(&passes) {
            r.check(n, ok, format!("{n} detail"));
        }
        r.dim("d", d as usize);
        let r = r.finish();
        let back = Report::from_json(&r.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), r.to_json());
        prop_assert_eq!(back.pass(), passes.iter().take(names.len()).all(|&x| x));
    }
}

/// A random element of the degree-one ideal: θ (or θ_1) times a cofactor.
fn dickson_multiple(t: &Tower, profile: &[usize], s: &[usize]) -> MultiPoly {
    let gen = if t.f() == 1 { dickson(t) } else { twisted_dickson(t, 2, 1).unwrap() };
    let rest: Vec<usize> = profile.iter().zip(gen.profile()).map(|(a, b)| a - b).collect();
    gen.multiply(t, &poly_from(t, &rest, s)).unwrap()
}

#[test]
fn unit_group_orders() {
    for (p, m) in [(3u64, 1usize), (3, 2), (5, 1), (5, 2)] {
        let ring = DualRing::new(p, m).unwrap();
        let units = ring.elements().iter().filter(|x| ring.is_unit(x)).count();
        assert_eq!(units as u64, (p - 1) * p.pow(m as u32));
    }
}

#[test]
fn induced_dimensions() {
    for fx in fixtures() {
        let t = &fx.tower;
        let q = t.q() as usize;
        let f = t.f();
        let m = vec![1; f];
        let ind = InducedSpace::new(t, &fx.group, Datum::BorelSym { m: m.clone(), e: 0 }).unwrap();
        assert_eq!(ind.dim(), (q + 1) * 2usize.pow(f as u32));
        let tor = InducedSpace::new(t, &fx.group, Datum::Torus { m: 0, e: 1 }).unwrap();
        assert_eq!(tor.dim(), q * (q - 1));
    }
}

#[test]
fn group_axioms_small() {
    {
        let t = Tower::new(3, 1).unwrap();
        let g = Group::new(&t).unwrap();
        let q = t.q() as usize;
        assert_eq!(g.order(), (q * q - 1) * (q * q - q));
        let e = GroupElem::identity();
        for x in g.elements() {
            assert_eq!(x.mul(&t, &x.inv(&t)), e);
            for y in g.elements().iter().step_by(5) {
                let xy = x.mul(&t, y);
                assert!(g.elements().contains(&xy));
                for z in g.elements().iter().step_by(11) {
                    assert_eq!(xy.mul(&t, z), x.mul(&t, &y.mul(&t, z)));
                }
            }
        }
    }
}
