//! Random formulas and traces, and brute-force monitors used as oracles.
#![allow(dead_code)]

use std::collections::HashMap;

use ogan_core::nn::{models, Activation, Conv1d, Dense, Layer, MaxPool1d, Network, Tensor};
use ogan_core::stl::{Expr, Formula, Interval, Relation, SignalRange, SignalRanges, Trace};
use ogan_core::survival::Observation;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SIGNALS: [&str; 2] = ["x", "y"];
pub const BOUND: f64 = 10.0;
/// Largest interval end generated; depth 3 reads at most 3 * MAX_END samples ahead.
pub const MAX_END: usize = 8;

pub fn ranges() -> SignalRanges {
    SIGNALS
        .iter()
        .map(|s| (s.to_string(), SignalRange::new(-BOUND, BOUND).unwrap()))
        .collect()
}

/// Values on a quarter grid (so ties occur) or anywhere in the range.
pub fn arb_value() -> impl Strategy<Value = f64> {
    prop_oneof![(-40i32..=40).prop_map(|k| k as f64 / 4.0), -BOUND..BOUND]
}

fn arb_relation() -> impl Strategy<Value = Relation> {
    prop_oneof![Just(Relation::Ge), Just(Relation::Gt), Just(Relation::Le), Just(Relation::Lt)]
}

/// Predicates over one signal (`x ~ c`, `abs(x) ~ c`) and, when `multi`,
/// differences of two signals.
pub fn arb_predicate(multi: bool) -> BoxedStrategy<Formula> {
    let single = (0..2usize, any::<bool>(), arb_relation(), arb_value()).prop_map(|(s, abs, rel, c)| {
        let sig = Expr::signal(SIGNALS[s]);
        let lhs = if abs { Expr::Abs(Box::new(sig)) } else { sig };
        Formula::predicate(lhs, rel, Expr::constant(c))
    });
    if !multi {
        return single.boxed();
    }
    let diff = (arb_relation(), arb_value()).prop_map(|(rel, c)| {
        let lhs = Expr::Sub(Box::new(Expr::signal("x")), Box::new(Expr::signal("y")));
        Formula::predicate(lhs, rel, Expr::constant(c))
    });
    prop_oneof![3 => single, 1 => diff].boxed()
}

pub fn arb_interval() -> impl Strategy<Value = Interval> {
    (0..=MAX_END).prop_flat_map(|hi| (0..=hi, Just(hi))).prop_map(|(lo, hi)| Interval::new(lo as f64, hi as f64).unwrap())
}

/// Formulas of depth at most `depth` over every operator of the grammar.
pub fn arb_formula(depth: u32, multi: bool) -> BoxedStrategy<Formula> {
    if depth == 0 {
        return arb_predicate(multi);
    }
    let sub = arb_formula(depth - 1, multi);
    prop_oneof![
        1 => arb_predicate(multi),
        1 => sub.clone().prop_map(Formula::not),
        1 => (sub.clone(), sub.clone()).prop_map(|(a, b)| Formula::and(a, b)),
        1 => (sub.clone(), sub.clone()).prop_map(|(a, b)| Formula::or(a, b)),
        1 => (sub.clone(), sub.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
        1 => (arb_interval(), sub.clone(), sub.clone()).prop_map(|(i, a, b)| Formula::until(i, a, b)),
        1 => (arb_interval(), sub.clone()).prop_map(|(i, a)| Formula::eventually(i, a)),
        1 => (arb_interval(), sub).prop_map(|(i, a)| Formula::always(i, a)),
    ]
    .boxed()
}

/// Unit-period trace of `len` samples per signal.
pub fn arb_trace(min_len: usize, max_len: usize) -> impl Strategy<Value = Trace> {
    (min_len..=max_len).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::vec(arb_value(), n), SIGNALS.len()).prop_map(|cols| {
            let columns = SIGNALS.iter().map(|s| s.to_string()).zip(cols).collect();
            Trace::from_columns(1.0, columns).unwrap()
        })
    })
}

/// Formula of depth <= 3 with a trace (length <= 100) long enough for it.
pub fn arb_case(multi: bool) -> impl Strategy<Value = (Formula, Trace)> {
    (arb_formula(3, multi), arb_trace(3 * MAX_END + 1, 100))
}

fn expr_value(e: &Expr, s: &HashMap<&str, &[f64]>, t: usize) -> f64 {
    match e {
        Expr::Signal(n) => s[n.as_str()][t],
        Expr::Const(c) => *c,
        Expr::Abs(a) => expr_value(a, s, t).abs(),
        Expr::Scale(c, a) => c * expr_value(a, s, t),
        Expr::Add(a, b) => expr_value(a, s, t) + expr_value(b, s, t),
        Expr::Sub(a, b) => expr_value(a, s, t) - expr_value(b, s, t),
    }
}

fn columns(trace: &Trace) -> HashMap<&str, &[f64]> {
    trace.components().collect()
}

fn window(i: &Interval, t: usize) -> std::ops::RangeInclusive<usize> {
    t + i.lo() as usize..=t + i.hi() as usize
}

/// Boolean satisfaction straight from the definitions, one time point at a
/// time. Until uses the half-open prefix `[t, t')`.
pub fn oracle_sat(f: &Formula, trace: &Trace, t: usize) -> bool {
    let s = columns(trace);
    sat(f, &s, t)
}

fn sat(f: &Formula, s: &HashMap<&str, &[f64]>, t: usize) -> bool {
    match f {
        Formula::True => true,
        Formula::Predicate { lhs, rel, rhs } => rel.holds(expr_value(lhs, s, t), expr_value(rhs, s, t)),
        Formula::Not(a) => !sat(a, s, t),
        Formula::And(a, b) => sat(a, s, t) && sat(b, s, t),
        Formula::Or(a, b) => sat(a, s, t) || sat(b, s, t),
        Formula::Implies(a, b) => !sat(a, s, t) || sat(b, s, t),
        Formula::Eventually(i, a) => window(i, t).any(|u| sat(a, s, u)),
        Formula::Always(i, a) => window(i, t).all(|u| sat(a, s, u)),
        Formula::Until(i, a, b) => window(i, t).any(|u| sat(b, s, u) && (t..u).all(|v| sat(a, s, v))),
    }
}

/// Traditional robustness straight from the definitions.
pub fn oracle_rho(f: &Formula, trace: &Trace, t: usize) -> f64 {
    let s = columns(trace);
    rho(f, &s, t)
}

fn rho(f: &Formula, s: &HashMap<&str, &[f64]>, t: usize) -> f64 {
    match f {
        Formula::True => f64::INFINITY,
        Formula::Predicate { lhs, rel, rhs } => {
            let (l, r) = (expr_value(lhs, s, t), expr_value(rhs, s, t));
            match rel {
                Relation::Ge | Relation::Gt => l - r,
                Relation::Le | Relation::Lt => r - l,
            }
        }
        Formula::Not(a) => -rho(a, s, t),
        Formula::And(a, b) => rho(a, s, t).min(rho(b, s, t)),
        Formula::Or(a, b) => rho(a, s, t).max(rho(b, s, t)),
        Formula::Implies(a, b) => (-rho(a, s, t)).max(rho(b, s, t)),
        Formula::Eventually(i, a) => window(i, t).map(|u| rho(a, s, u)).fold(f64::NEG_INFINITY, f64::max),
        Formula::Always(i, a) => window(i, t).map(|u| rho(a, s, u)).fold(f64::INFINITY, f64::min),
        Formula::Until(i, a, b) => window(i, t)
            .map(|u| (t..u).map(|v| rho(a, s, v)).fold(rho(b, s, u), f64::min))
            .fold(f64::NEG_INFINITY, f64::max),
    }
}

/// `trace` with every sample moved by `delta(signal, index)`.
pub fn perturb(trace: &Trace, mut delta: impl FnMut(usize) -> f64) -> Trace {
    let mut k = 0;
    trace.map_values(|_, _, v| {
        k += 1;
        v + delta(k)
    })
}

// Gradient checks.

pub const GRAD_STEP: f64 = 1e-5;
pub const GRAD_TOLERANCE: f64 = 1e-4;

/// Fills every parameter with uniform values in [-1, 1].
pub fn randomize(net: &mut Network<f64>, rng: &mut ChaCha8Rng) {
    for p in net.params_mut() {
        for w in p.value.data_mut() {
            *w = rng.random_range(-1.0..1.0);
        }
    }
}

pub fn random_tensor(shape: Vec<usize>, rng: &mut ChaCha8Rng) -> Tensor<f64> {
    let n = shape.iter().product();
    Tensor::new(shape, (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

/// Scalar objective `sum_i c_i * out_i`.
fn objective(net: &Network<f64>, x: &Tensor<f64>, c: &[f64]) -> f64 {
    let y = net.predict(x).unwrap();
    y.data().iter().zip(c).map(|(a, b)| a * b).sum()
}

fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = na.max(nb);
    if scale < 1e-12 {
        diff
    } else {
        diff / scale
    }
}

/// Distance below which a point counts as sitting on a kink of a leaky ReLU
/// or max-pool; central differences are meaningless there.
const KINK_MARGIN: f64 = 1e-3;

/// True when some leaky-ReLU input or max-pool comparison of the forward pass
/// lies within `KINK_MARGIN` of a kink.
fn near_kink(net: &Network<f64>, x: &Tensor<f64>) -> bool {
    let mut h = x.clone();
    for layer in net.layers() {
        match layer {
            Layer::Activation(Activation::LeakyRelu(_)) => {
                if h.data().iter().any(|v| v.abs() < KINK_MARGIN) {
                    return true;
                }
            }
            Layer::MaxPool1d(_) => {
                // window 2, stride 2 throughout the tests
                let l = *h.shape().last().unwrap();
                for row in h.data().chunks_exact(l) {
                    if row.chunks_exact(2).any(|w| (w[0] - w[1]).abs() < KINK_MARGIN) {
                        return true;
                    }
                }
            }
            _ => {}
        }
        h = Network::new(vec![layer.clone()]).predict(&h).unwrap();
    }
    false
}

/// Relative error between analytic parameter and input gradients and
/// central differences, or `None` when the point sits on a kink.
pub fn gradient_error(mut net: Network<f64>, x: Tensor<f64>, seed: u64) -> Option<f64> {
    if near_kink(&net, &x) {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let out_len = net.predict(&x).unwrap().len();
    let c: Vec<f64> = (0..out_len).map(|_| rng.random_range(-1.0..1.0)).collect();

    net.zero_grad();
    let y = net.forward(&x).unwrap();
    let dy = Tensor::new(y.shape().to_vec(), c.clone()).unwrap();
    let dx = net.backward(&dy).unwrap();

    let mut analytic = Vec::new();
    let mut numeric = Vec::new();
    let counts: Vec<usize> = net.params().iter().map(|p| p.value.len()).collect();
    for (pi, &n) in counts.iter().enumerate() {
        for j in 0..n {
            analytic.push(net.params()[pi].grad[j]);
            let orig = net.params()[pi].value.data()[j];
            net.params_mut()[pi].value.data_mut()[j] = orig + GRAD_STEP;
            let up = objective(&net, &x, &c);
            net.params_mut()[pi].value.data_mut()[j] = orig - GRAD_STEP;
            let down = objective(&net, &x, &c);
            net.params_mut()[pi].value.data_mut()[j] = orig;
            numeric.push((up - down) / (2.0 * GRAD_STEP));
        }
    }
    for j in 0..x.len() {
        analytic.push(dx.data()[j]);
        let mut xp = x.clone();
        xp.data_mut()[j] += GRAD_STEP;
        let mut xm = x.clone();
        xm.data_mut()[j] -= GRAD_STEP;
        numeric.push((objective(&net, &xp, &c) - objective(&net, &xm, &c)) / (2.0 * GRAD_STEP));
    }
    Some(relative_error(&analytic, &numeric))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradCase {
    Dense,
    Conv,
    MaxPool,
    Activation,
    Flatten,
    /// Generator followed by the convolutional discriminator.
    Composed,
}

impl GradCase {
    pub const ALL: [GradCase; 6] = [
        GradCase::Dense,
        GradCase::Conv,
        GradCase::MaxPool,
        GradCase::Activation,
        GradCase::Flatten,
        GradCase::Composed,
    ];
}

/// Random network and input of the given kind, with shapes drawn from `seed`.
pub fn gradient_case(kind: GradCase, seed: u64) -> (Network<f64>, Tensor<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let batch = rng.random_range(1..4);
    let (mut net, shape) = match kind {
        GradCase::Dense => {
            let (i, o) = (rng.random_range(1..6), rng.random_range(1..6));
            (Network::new(vec![Layer::Dense(Dense::new(i, o))]), vec![batch, i])
        }
        GradCase::Conv => {
            let (ci, co, len) = (rng.random_range(1..4), rng.random_range(1..4), rng.random_range(2..7));
            (Network::new(vec![Layer::Conv1d(Conv1d::new(ci, co, 2, 1))]), vec![batch, ci, len])
        }
        GradCase::MaxPool => {
            let (ch, len) = (rng.random_range(1..3), rng.random_range(2..9));
            (Network::new(vec![Layer::MaxPool1d(MaxPool1d::new(2, 2))]), vec![batch, ch, len])
        }
        GradCase::Activation => {
            let act = [Activation::LEAKY, Activation::Tanh, Activation::Sigmoid][rng.random_range(0..3)];
            (Network::new(vec![Layer::Activation(act)]), vec![batch, rng.random_range(1..6)])
        }
        GradCase::Flatten => {
            let (ch, len) = (rng.random_range(1..3), rng.random_range(1..5));
            (Network::new(vec![Layer::Flatten, Layer::Dense(Dense::new(ch * len, 2))]), vec![batch, ch, len])
        }
        GradCase::Composed => {
            let (latent, dim) = (rng.random_range(1..4), rng.random_range(2..7));
            let g: Network<f64> = models::generator(latent, 6, dim);
            let d: Network<f64> = models::conv_discriminator(dim, 3, 5);
            let mut layers = g.layers().to_vec();
            layers.extend(d.layers().iter().cloned());
            (Network::new(layers), vec![batch, latent])
        }
    };
    randomize(&mut net, &mut rng);
    let x = random_tensor(shape, &mut rng);
    (net, x)
}


// Survival oracles.

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Product-limit value at `t` as an exact fraction, from the definition.
pub fn brute_km(obs: &[Observation], t: usize) -> f64 {
    let (mut num, mut den) = (1u128, 1u128);
    for i in 1..=t {
        let n = obs.iter().filter(|o| o.time >= i).count() as u128;
        let d = obs.iter().filter(|o| o.time == i && !o.censored).count() as u128;
        if d > 0 {
            num *= n - d;
            den *= n;
            let g = gcd(num, den).max(1);
            num /= g;
            den /= g;
        }
    }
    num as f64 / den as f64
}

/// Log-rank statistic summed directly from per-time counts.
pub fn brute_logrank(a: &[Observation], b: &[Observation], budget: usize) -> (f64, f64) {
    let count = |g: &[Observation], t: usize| {
        (
            g.iter().filter(|o| o.time == t && !o.censored).count(),
            g.iter().filter(|o| o.time >= t).count(),
        )
    };
    let (mut u, mut v) = (0.0, 0.0);
    for t in 1..=budget {
        let (da, na) = count(a, t);
        let (db, nb) = count(b, t);
        if da + db == 0 {
            continue;
        }
        let (d, n) = ((da + db) as f64, (na + nb) as f64);
        u += da as f64 - d * na as f64 / n;
        if n > 1.0 {
            v += d * (na as f64 / n) * (nb as f64 / n) * (n - d) / (n - 1.0);
        }
    }
    (u, if v > 0.0 { u * u / v } else { 0.0 })
}

/// Random dataset with at most `max_n` observations and budget at most `max_b`.
pub fn random_dataset(rng: &mut ChaCha8Rng, max_n: usize, max_b: usize) -> (usize, Vec<Observation>) {
    let b = rng.random_range(1..=max_b);
    let n = rng.random_range(1..=max_n);
    let obs = (0..n)
        .map(|_| {
            if rng.random::<bool>() {
                Observation::censored(b)
            } else {
                Observation::event(rng.random_range(1..=b))
            }
        })
        .collect();
    (b, obs)
}
