use dbm::evo::zdt::{mean_front_deviation, ZdtProblem};
use dbm::evo::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_points(rng: &mut ChaCha8Rng, n: usize, levels: u32) -> Vec<Vec<f64>> {
    // a coarse lattice produces ties and duplicates, the interesting cases
    (0..n).map(|_| (0..2).map(|_| f64::from(rng.gen_range(0..levels))).collect()).collect()
}

#[test]
fn dominance_examples() {
    assert!(dominates(&[2.0, 3.0], &[1.0, 3.0], Sense::Maximize).unwrap());
    assert!(!dominates(&[2.0, 3.0], &[2.0, 3.0], Sense::Maximize).unwrap());
    assert!(!dominates(&[2.0, 1.0], &[1.0, 3.0], Sense::Maximize).unwrap());
    assert!(dominates(&[1.0, 3.0], &[2.0, 3.0], Sense::Minimize).unwrap());
    assert!(dominates(&[1.0], &[1.0, 2.0], Sense::Maximize).is_err());
}

#[test]
fn dominance_is_a_strict_partial_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for sense in [Sense::Maximize, Sense::Minimize] {
        for _ in 0..50_000 {
            let p = random_points(&mut rng, 3, 4);
            let d = |i: usize, j: usize| dominates(&p[i], &p[j], sense).unwrap();
            assert!(!d(0, 0));
            assert!(!(d(0, 1) && d(1, 0)));
            if d(0, 1) && d(1, 2) {
                assert!(d(0, 2), "{p:?}");
            }
        }
    }
}

/// Peel fronts by checking every remaining point against every other.
fn peel_fronts(p: &[Vec<f64>], sense: Sense) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = (0..p.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> =
            left.iter().copied().filter(|&i| !left.iter().any(|&j| dominates(&p[j], &p[i], sense).unwrap())).collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

#[test]
fn sort_matches_peeling_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for instance in 0..200 {
        let n = rng.gen_range(1..=100);
        let levels = if instance % 2 == 0 { 6 } else { 1000 };
        let p = random_points(&mut rng, n, levels);
        let sense = if instance % 3 == 0 { Sense::Minimize } else { Sense::Maximize };
        let mut got = non_dominated_sort(&p, sense);
        got.iter_mut().for_each(|f| f.sort_unstable());
        assert_eq!(got, peel_fronts(&p, sense), "instance {instance}");
    }
}

#[test]
fn crowding_marks_boundaries_infinite() {
    let front = vec![vec![0.0, 4.0], vec![1.0, 2.0], vec![3.0, 1.0], vec![4.0, 0.0]];
    let c = crowding_distance(&front);
    assert!(c[0].is_infinite() && c[3].is_infinite());
    // normalized side lengths of the neighbour boxes
    assert!((c[1] - (3.0 / 4.0 + 3.0 / 4.0)).abs() < 1e-12);
    assert!((c[2] - (3.0 / 4.0 + 2.0 / 4.0)).abs() < 1e-12);
}

#[test]
fn hypervolume_matches_grid_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let p = random_points(&mut rng, 15, 10);
        let hv = hypervolume_2d(&p, [-1.0, -1.0], Sense::Maximize);
        // unit cells [a, a+1) x [b, b+1) above the reference that some point covers
        let mut cells = 0;
        for a in -1..10 {
            for b in -1..10 {
                if p.iter().any(|q| q[0] >= f64::from(a + 1) && q[1] >= f64::from(b + 1)) {
                    cells += 1;
                }
            }
        }
        assert_eq!(hv, f64::from(cells));
    }
}

#[test]
fn archive_stays_consistent_under_random_inserts() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut a = ParetoArchive::new(Sense::Maximize, DEFAULT_DEDUP_TOLERANCE);
    for _ in 0..2000 {
        let o = random_points(&mut rng, 1, 30).pop().unwrap();
        a.insert(Individual::new(o.clone(), o));
        assert!(a.is_consistent());
    }
    let objs: Vec<Vec<f64>> = a.members.iter().map(|m| m.objectives.clone()).collect();
    assert_eq!(non_dominated_sort(&objs, Sense::Maximize).len(), 1);
}

fn zdt_objective(p: ZdtProblem) -> impl Fn(&[f64]) -> Vec<f64> + Sync {
    move |w| {
        let (a, b) = p.evaluate(w).unwrap();
        vec![a, b]
    }
}

fn run_zdt(p: ZdtProblem, generations: usize, seed: u64) -> Nsga2Result {
    let cfg = GaConfig { population: 100, max_generations: generations, seed, ..Default::default() };
    nsga2(zdt_objective(p), &p.bounds(25), &cfg, Sense::Minimize, &[], Some([11.0, 11.0]), DEFAULT_DEDUP_TOLERANCE)
        .unwrap()
}

#[test]
fn nsga2_does_not_depend_on_thread_count() {
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| run_zdt(ZdtProblem::Zdt1, 30, 9))
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a.population, b.population);
    assert_eq!(a.history, b.history);
    assert_ne!(run_zdt(ZdtProblem::Zdt1, 30, 10).population, a.population);
}

#[test]
fn elitism_keeps_best_values_and_hypervolume() {
    let r = run_zdt(ZdtProblem::Zdt2, 60, 1);
    for w in r.history.windows(2) {
        assert!(w[1].best[0] <= w[0].best[0] && w[1].best[1] <= w[0].best[1]);
        assert!(w[1].hypervolume.unwrap() >= w[0].hypervolume.unwrap());
    }
    assert!(r.history.iter().all(|m| m.archive_consistent));
    assert_eq!(r.history.len(), 61);
}

#[test]
fn zdt_fronts_are_reached() {
    for (p, tol) in [(ZdtProblem::Zdt1, 0.01), (ZdtProblem::Zdt2, 0.01), (ZdtProblem::Zdt6, 0.05)] {
        let r = run_zdt(p, 500, 0);
        let pts: Vec<Vec<f64>> = r.archive.members.iter().map(|m| m.objectives.clone()).collect();
        let dev = mean_front_deviation(p, &pts);
        assert!(dev <= tol, "{}: {dev}", p.name());
        assert!(r.archive.len() >= 20, "{}: {}", p.name(), r.archive.len());
    }
}

#[test]
fn ga_trace_is_monotone_and_reaches_the_sphere_minimum() {
    let bounds: Bounds = vec![(-5.0, 5.0); 10];
    let cfg = GaConfig { population: 40, max_generations: 200, seed: 3, ..Default::default() };
    let r = ga_minimize(|x| x.iter().map(|v| (v - 1.0) * (v - 1.0)).sum(), &bounds, &cfg, &[]).unwrap();
    assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
    assert!(r.best.objectives[0] < 1e-3, "{}", r.best.objectives[0]);
    assert_eq!(r.generations(), 200);
}

#[test]
fn invalid_configurations_are_rejected_up_front() {
    let bounds: Bounds = vec![(0.0, 1.0)];
    let f = |x: &[f64]| vec![x[0], -x[0]];
    for cfg in [
        GaConfig { population: 3, ..Default::default() },
        GaConfig { crossover_rate: 1.5, ..Default::default() },
        GaConfig { mutation_rate: Some(-0.1), ..Default::default() },
    ] {
        assert!(nsga2(f, &bounds, &cfg, Sense::Maximize, &[], None, 0.0).is_err());
    }
    assert!(nsga2(f, &vec![(1.0, 0.0)], &GaConfig::default(), Sense::Maximize, &[], None, 0.0).is_err());
}

#[test]
fn archive_with_boundary_members_round_trips_through_json() {
    let r = run_zdt(ZdtProblem::Zdt1, 10, 5);
    assert!(r.archive.members.iter().any(|m| m.crowding.is_infinite()));
    let back: ParetoArchive = serde_json::from_str(&serde_json::to_string(&r.archive).unwrap()).unwrap();
    assert_eq!(back.members, r.archive.members);
}
