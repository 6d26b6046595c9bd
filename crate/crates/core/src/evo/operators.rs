//! Real-coded variation: simulated binary crossover and polynomial mutation,
//! both bounded (Deb and Agrawal's formulation).

use rand::Rng;

use super::Bounds;

/// Bounded SBX applied to each gene with probability `gene_rate`; returns two
/// children.
pub fn sbx_crossover<R: Rng>(
    rng: &mut R,
    p1: &[f64],
    p2: &[f64],
    bounds: &Bounds,
    eta: f64,
    gene_rate: f64,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    for (i, &(lo, hi)) in bounds.iter().enumerate() {
        if rng.gen::<f64>() >= gene_rate {
            continue;
        }
        let (a, b) = (p1[i], p2[i]);
        if (a - b).abs() <= 1e-14 || hi <= lo {
            continue;
        }
        let (y1, y2) = if a < b { (a, b) } else { (b, a) };
        let u: f64 = rng.gen();

        let beta = 1.0 + 2.0 * (y1 - lo) / (y2 - y1);
        let alpha = 2.0 - beta.powf(-(eta + 1.0));
        let bq = spread(u, alpha, eta);
        let child_lo = 0.5 * ((y1 + y2) - bq * (y2 - y1));

        let beta = 1.0 + 2.0 * (hi - y2) / (y2 - y1);
        let alpha = 2.0 - beta.powf(-(eta + 1.0));
        let bq = spread(u, alpha, eta);
        let child_hi = 0.5 * ((y1 + y2) + bq * (y2 - y1));

        let child_lo = child_lo.clamp(lo, hi);
        let child_hi = child_hi.clamp(lo, hi);
        if rng.gen::<bool>() {
            c1[i] = child_hi;
            c2[i] = child_lo;
        } else {
            c1[i] = child_lo;
            c2[i] = child_hi;
        }
    }
    (c1, c2)
}

fn spread(u: f64, alpha: f64, eta: f64) -> f64 {
    if u <= 1.0 / alpha {
        (u * alpha).powf(1.0 / (eta + 1.0))
    } else {
        (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
    }
}

/// Bounded polynomial mutation; each gene mutates with probability `rate`.
pub fn polynomial_mutation<R: Rng>(rng: &mut R, x: &mut [f64], bounds: &Bounds, rate: f64, eta: f64) {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds.iter()) {
        if rng.gen::<f64>() >= rate || hi <= lo {
            continue;
        }
        let span = hi - lo;
        let d1 = (*v - lo) / span;
        let d2 = (hi - *v) / span;
        let u: f64 = rng.gen();
        let pow = 1.0 / (eta + 1.0);
        let dq = if u < 0.5 {
            let xy = 1.0 - d1;
            let val = 2.0 * u + (1.0 - 2.0 * u) * xy.powf(eta + 1.0);
            val.powf(pow) - 1.0
        } else {
            let xy = 1.0 - d2;
            let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(eta + 1.0);
            1.0 - val.powf(pow)
        };
        *v = (*v + dq * span).clamp(lo, hi);
    }
}

pub fn uniform_genome<R: Rng>(rng: &mut R, bounds: &Bounds) -> Vec<f64> {
    bounds.iter().map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..=hi) } else { lo }).collect()
}

pub fn clip(x: &mut [f64], bounds: &Bounds) {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds.iter()) {
        *v = v.clamp(lo, hi);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn children_stay_in_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bounds: Bounds = vec![(-1.0, 1.0); 10];
        for _ in 0..500 {
            let p1 = uniform_genome(&mut rng, &bounds);
            let p2 = uniform_genome(&mut rng, &bounds);
            let (mut c1, c2) = sbx_crossover(&mut rng, &p1, &p2, &bounds, 15.0, 0.5);
            polynomial_mutation(&mut rng, &mut c1, &bounds, 0.5, 20.0);
            assert!(c1.iter().chain(&c2).all(|v| (-1.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn sbx_preserves_gene_mean_inside_bounds() {
        // away from the bounds the two children are symmetric about the parents' mean
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let bounds: Bounds = vec![(-100.0, 100.0)];
        for _ in 0..200 {
            let (c1, c2) = sbx_crossover(&mut rng, &[0.2], &[0.6], &bounds, 15.0, 0.5);
            assert!((c1[0] + c2[0] - 0.8).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_rate_mutation_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bounds: Bounds = vec![(0.0, 1.0); 4];
        let mut x = vec![0.1, 0.2, 0.3, 0.4];
        polynomial_mutation(&mut rng, &mut x, &bounds, 0.0, 20.0);
        assert_eq!(x, vec![0.1, 0.2, 0.3, 0.4]);
    }
}
