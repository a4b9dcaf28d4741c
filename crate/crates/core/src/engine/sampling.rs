use rand::seq::SliceRandom;
use rand::Rng;

use crate::signal::TestInput;

/// `n` i.i.d. points of `[-1, 1]^d`.
pub fn sample_uniform<R: Rng>(d: usize, n: usize, rng: &mut R) -> Vec<TestInput> {
    (0..n)
        .map(|_| TestInput::new((0..d).map(|_| rng.random_range(-1.0..=1.0)).collect()))
        .collect()
}

/// Latin hypercube sample of `n` points of `[-1, 1]^d`: in every dimension
/// each of the `n` equal strata holds exactly one point.
pub fn sample_lhs<R: Rng>(d: usize, n: usize, rng: &mut R) -> Vec<TestInput> {
    let mut points = vec![vec![0.0; d]; n];
    let width = 2.0 / n as f64;
    for j in 0..d {
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(rng);
        for (point, &s) in points.iter_mut().zip(&strata) {
            let u: f64 = rng.random();
            point[j] = (-1.0 + (s as f64 + u) * width).min(1.0);
        }
    }
    points.into_iter().map(TestInput::new).collect()
}

/// Stratum index of `x` among `n` equal strata of `[-1, 1]`.
pub fn stratum(x: f64, n: usize) -> usize {
    (((x + 1.0) / 2.0 * n as f64).floor() as usize).min(n - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_uniform(3, 0, &mut rng).is_empty());
        let s = sample_uniform(4, 100, &mut rng);
        assert!(s.iter().flat_map(|t| t.as_slice()).all(|v| (-1.0..=1.0).contains(v)));
        let a = sample_uniform(2, 5, &mut ChaCha8Rng::seed_from_u64(9));
        let b = sample_uniform(2, 5, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn lhs_two_points_one_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = sample_lhs(1, 2, &mut rng);
        let mut v: Vec<f64> = s.iter().map(|t| t.as_slice()[0]).collect();
        v.sort_by(f64::total_cmp);
        assert!((-1.0..0.0).contains(&v[0]) && (0.0..=1.0).contains(&v[1]));
    }
}
