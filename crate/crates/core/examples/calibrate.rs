//! Runs OGAN and random search on a SUT and prints falsification statistics.
//!
//! Usage: `calibrate <sut-b|sut-c> [replicas] [window_start band_lo band_hi]`

use std::time::Instant;

use ogan_core::engine::{run_ogan, run_random_search, OganConfig, Problem, SamplerKind, StopCondition, Variant};
use ogan_core::par;
use ogan_core::sut::{builtin, sut_deceptive_ridge_with, RidgeParameters};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map(String::as_str).unwrap_or("sut-c");
    let replicas: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let sut = if args.len() >= 5 {
        let p: Vec<f64> = args[2..5].iter().map(|s| s.parse().unwrap()).collect();
        sut_deceptive_ridge_with(RidgeParameters {
            window_start: p[0],
            band_lo: p[1],
            band_hi: p[2],
        })
        .unwrap()
    } else {
        builtin(name).unwrap()
    };
    let variant = match std::env::var("VARIANT").as_deref() {
        Ok("nonadaptive") => Variant::Nonadaptive,
        _ => Variant::Adaptive,
    };
    let problem = Problem::with_default_requirement(sut).unwrap();
    println!("requirement: {}", problem.requirement);
    let seeds: Vec<u64> = (0..replicas).map(|i| 1000 + i).collect();
    let start = Instant::now();
    let results = par::map(&seeds, |&seed| {
        let t = Instant::now();
        let config = OganConfig {
            seed,
            variant,
            ..OganConfig::default()
        };
        let o = run_ogan(&problem, &config).unwrap();
        let r = run_random_search(&problem, 300, SamplerKind::Uniform, StopCondition::FirstFalsification, seed).unwrap();
        let secs = t.elapsed().as_secs_f64();
        let best = o.tests.iter().map(|r| r.raw_robustness).fold(f64::INFINITY, f64::min);
        println!(
            "seed {seed}: ogan {} at {} (best raw {best:.3}), random {} at {}, {secs:.1}s",
            o.falsified, o.executions, r.falsified, r.executions
        );
        (o.falsified, r.falsified)
    });
    let fo = results.iter().filter(|r| r.0).count();
    let fr = results.iter().filter(|r| r.1).count();
    println!(
        "FR ogan {}/{replicas}, random {}/{replicas}, {:.1}s",
        fo,
        fr,
        start.elapsed().as_secs_f64()
    );
}
