use isograph::abelian::{
    character_inner_product, group_from_relations, FiniteAbelianGroup, GroupElement, Homomorphism, Subgroup,
};
use isograph::arith::kronecker;
use isograph::cayley::{CayleyGraph, LabeledElement};
use isograph::ecgraph::{rational_kernels, velu_codomain, velu_image, Curve, Point};
use isograph::pathfind::{find_path, PathCertificate, SearchConfig};
use isograph::quadform::{class_group, compose, pow, prime_form, reduce, Discriminant, FormClass, QuadForm, Splitting};
use isograph::walks::{random_walk, trial_rng};
use proptest::prelude::*;

fn group() -> impl Strategy<Value = FiniteAbelianGroup> {
    prop::collection::vec(1u64..=12, 1..=3).prop_map(|f| FiniteAbelianGroup::from_cyclic_factors(&f).unwrap().0)
}

fn group_with_elements(k: usize) -> impl Strategy<Value = (FiniteAbelianGroup, Vec<GroupElement>)> {
    group()
        .prop_flat_map(move |g| {
            let n = g.order() as usize;
            (Just(g), prop::collection::vec(0..n, k))
        })
        .prop_map(|(g, idx)| {
            let els = idx.into_iter().map(|i| g.element_at(i)).collect();
            (g, els)
        })
}

fn det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => (0..m.len())
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn reduced_form_count(d: i64) -> u64 {
    let n = -d;
    let mut count = 0;
    let mut a = 1;
    while 3 * a * a <= n {
        for b in -a + 1..=a {
            if (b * b + n) % (4 * a) == 0 {
                let c = (b * b + n) / (4 * a);
                let g = num_integer::gcd(num_integer::gcd(a, b), c);
                if c > a || (c == a && b >= 0) {
                    count += u64::from(g == 1);
                }
            }
        }
        a += 1;
    }
    count
}

fn discriminant() -> impl Strategy<Value = i64> {
    prop_oneof![(1i64..5000).prop_map(|x| -(4 * x)), (0i64..5000).prop_map(|x| -(4 * x + 3))]
}

fn cyclic_graph(n: u64, steps: &[u64]) -> CayleyGraph {
    let g = FiniteAbelianGroup::new(vec![n]).unwrap();
    let mut gens = Vec::new();
    for &s in steps {
        gens.push(LabeledElement { label: format!("+{s}"), element: g.element(&[s as i64]).unwrap() });
        gens.push(LabeledElement { label: format!("-{s}"), element: g.element(&[-(s as i64)]).unwrap() });
    }
    CayleyGraph::build(Subgroup::whole(&g).unwrap(), gens).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn group_axioms((g, e) in group_with_elements(3)) {
        let (a, b, c) = (&e[0], &e[1], &e[2]);
        prop_assert_eq!(g.op(&g.op(a, b)?, c)?, g.op(a, &g.op(b, c)?)?);
        prop_assert_eq!(g.op(a, b)?, g.op(b, a)?);
        prop_assert_eq!(g.op(a, &g.inv(a)?)?, g.identity());
        prop_assert_eq!(g.order() % g.element_order(a), 0);
        prop_assert_eq!(g.pow(a, g.element_order(a) as i64)?, g.identity());
    }

    #[test]
    fn relation_matrix_order_is_determinant(rows in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 3)) {
        let d = det(&rows);
        prop_assume!(d != 0);
        let (g, images) = group_from_relations(3, &rows)?;
        prop_assert_eq!(g.order(), d.unsigned_abs());
        for r in &rows {
            let mut acc = g.identity();
            for (img, &k) in images.iter().zip(r) {
                acc = g.op(&acc, &g.pow(img, k)?)?;
            }
            prop_assert_eq!(acc, g.identity());
        }
    }

    #[test]
    fn characters_are_orthonormal(g in group()) {
        let chars: Vec<_> = g.characters().collect();
        prop_assert_eq!(chars.len() as u64, g.order());
        let n = g.order() as f64;
        for (i, chi) in chars.iter().enumerate().step_by(3) {
            for (j, psi) in chars.iter().enumerate().step_by(2) {
                let ip = character_inner_product(&g, chi, psi);
                let want = if i == j { n } else { 0.0 };
                prop_assert!((ip.re - want).abs() < 1e-9 && ip.im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn lagrange_and_extension((g, e) in group_with_elements(2)) {
        let h = Subgroup::generated(&g, &e)?;
        prop_assert_eq!(g.order() % h.order(), 0);
        prop_assert_eq!(h.order() * h.index(), g.order());
        for chi in h.characters() {
            let ext = h.extend_character(&chi);
            prop_assert_eq!(h.restrict(&ext), chi.clone());
            for x in h.elements() {
                prop_assert_eq!(g.eval(&ext, x), h.eval(&chi, x).unwrap());
            }
        }
        let annihilating = g.characters().filter(|chi| h.annihilates(chi)).count() as u64;
        prop_assert_eq!(annihilating, h.index());
    }

    #[test]
    fn kernel_times_image((src, _) in group_with_elements(0), (tgt, pool) in group_with_elements(6)) {
        let images: Vec<GroupElement> = (0..src.rank())
            .map(|i| {
                let d = src.invariants()[i];
                let pick = &pool[i % pool.len()];
                let o = tgt.element_order(pick);
                tgt.pow(pick, (o / num_integer::gcd(o, d)) as i64).unwrap()
            })
            .collect();
        let f = Homomorphism::new(src.clone(), tgt.clone(), images)?;
        let (kernel, index) = f.kernel_and_index()?;
        let image = f.image()?;
        prop_assert_eq!(kernel.order() * image.order(), src.order());
        prop_assert_eq!(image.order() * index, tgt.order());
    }

    #[test]
    fn composition_laws(d in discriminant(), i in 0usize..1000, j in 0usize..1000, k in 0usize..1000) {
        let cl = class_group(Discriminant::new(d)?)?;
        let classes = cl.classes();
        let (x, y, z) = (classes[i % classes.len()], classes[j % classes.len()], classes[k % classes.len()]);
        let one = FormClass::principal(d);
        prop_assert_eq!(compose(&compose(&x, &y)?, &z)?, compose(&x, &compose(&y, &z)?)?);
        prop_assert_eq!(compose(&x, &y)?, compose(&y, &x)?);
        prop_assert_eq!(compose(&x, &one)?, x);
        prop_assert!(compose(&x, &x.inverse())?.is_principal());
        prop_assert!(pow(&x, cl.order() as i64)?.is_principal());
        let gx = cl.element_of(&x).unwrap();
        let gy = cl.element_of(&y).unwrap();
        prop_assert_eq!(cl.element_of(&compose(&x, &y)?).unwrap(), &cl.group().op(gx, gy)?);
    }

    #[test]
    fn class_number_matches_enumeration(d in discriminant()) {
        prop_assert_eq!(class_group(Discriminant::new(d)?)?.order(), reduced_form_count(d));
    }

    #[test]
    fn reduction_is_idempotent(d in discriminant(), a in 1i64..60, t in -200i64..200) {
        let b = d.rem_euclid(2) + 2 * t;
        prop_assume!((b * b - d) % (4 * a) == 0);
        let f = QuadForm::new(a, b, (b * b - d) / (4 * a));
        let r = reduce(f)?;
        prop_assert!(r.is_reduced_definite());
        prop_assert_eq!(r.discriminant(), f.discriminant());
        prop_assert_eq!(reduce(r)?, r);
    }

    #[test]
    fn kronecker_trichotomy(d in discriminant(), idx in 0usize..25) {
        let ell = [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101][idx];
        let disc = Discriminant::new(d)?;
        prop_assume!(disc.conductor() % ell != 0);
        let pf = prime_form(&disc, ell)?;
        match kronecker(d, ell) {
            -1 => prop_assert!(pf.is_none()),
            0 => prop_assert_eq!(pf.map(|p| (p.splitting, p.forms.len())), Some((Splitting::Ramified, 1))),
            _ => {
                let p = pf.unwrap();
                prop_assert_eq!(p.splitting, Splitting::Split);
                prop_assert_eq!(p.forms.len(), 2);
                prop_assert_eq!(p.classes[0].inverse(), p.classes[1]);
            }
        }
    }

    #[test]
    fn certificates_replay(n in 9u64..80, s1 in 1u64..5, s2 in 1u64..5, a in 0usize..80, b in 0usize..80, seed: u64) {
        let g = cyclic_graph(n, &[s1, s2, 1]);
        let (a, b) = (a % n as usize, b % n as usize);
        let cfg = SearchConfig { walk_length: None, cap_factor: 1000 };
        if let Ok((cert, _)) = find_path(&g, a, b, seed, &cfg) {
            prop_assert_eq!(cert.replay(&g)?, b);
            prop_assert_eq!(cert.reversed().replay(&g)?, a);
            let back = PathCertificate::from_json(&g, &cert.to_json(&g))?;
            prop_assert_eq!(back, cert);
        }
    }

    #[test]
    fn walks_are_deterministic(n in 2u64..100, len in 0usize..50, seed: u64, stream: u64) {
        let g = cyclic_graph(n, &[1, 2]);
        let x = random_walk(&g, 0, len, &mut trial_rng(seed, stream));
        let y = random_walk(&g, 0, len, &mut trial_rng(seed, stream));
        prop_assert_eq!(x, y);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn isogenies_are_homomorphisms(pi in 0usize..6, a in 0u64..1000, b in 0u64..1000, seed: u64) {
        let p = [31u64, 37, 43, 53, 61, 101][pi];
        let Ok(curve) = Curve::new(p, a % p, b % p) else { return Ok(()) };
        let mut rng = trial_rng(seed, 0);
        for ell in [3u64, 5] {
            for ker in rational_kernels(&curve, ell)? {
                let (ca, cb) = velu_codomain(&curve, &ker);
                let target = Curve::new(p, ca, cb)?;
                prop_assert_eq!(target.t, curve.t);
                let (x, y) = (curve.random_point(&mut rng), curve.random_point(&mut rng));
                let image = |pt: &Point| velu_image(&curve, &ker, pt);
                prop_assert!(target.contains(&image(&x)));
                prop_assert_eq!(target.add(&image(&x), &image(&y)), image(&curve.add(&x, &y)));
                prop_assert_eq!(image(&Point::Infinity), Point::Infinity);
            }
        }
    }
}
