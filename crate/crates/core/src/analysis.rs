//! Measures, gap bounds, the explicit non-covered point, and loneliness
//! times of runners.

use num::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::geometry::{
    beam_lattice_point, canonical_witness, default_delta, membership_residual, CoveringConfig,
};
use crate::intervals::{check_delta, Interval, IntervalSet};
use crate::rational::Rational;

/// `ℳ₀^δ(z)` against its upper bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub z: Rational,
    pub delta: Rational,
    pub measure: Rational,
    pub bound: Rational,
    pub tight: bool,
}

/// `⌈δ(z−1)⌉`: the first bridge index that can reach `𝒦₀(δ)`.
pub fn first_bridge_index(z: &Rational, delta: &Rational) -> i64 {
    (delta * (z - 1))
        .ceil()
        .to_i64()
        .expect("index fits in i64")
}

/// `⌊(1−δ)z+δ⌋`: the last bridge index that can reach `𝒦₀(δ)`.
pub fn last_bridge_index(z: &Rational, delta: &Rational) -> i64 {
    ((Rational::one() - delta) * z + delta)
        .floor()
        .to_i64()
        .expect("index fits in i64")
}

/// `2δ(1−2δ)/(1−δ)`.
pub fn measure_bound(delta: &Rational) -> Rational {
    delta * 2 * (Rational::one() - delta * 2) / (Rational::one() - delta)
}

/// Lebesgue measure of `ℬ(δ)/z ∩ 𝒦₀(δ)`.
pub fn k0_measure(z: &Rational, delta: &Rational) -> Result<MeasureReport> {
    check_delta(delta)?;
    if *z < 1 {
        return Err(param(format!("speed ratio {z} below 1")));
    }
    let lo = (first_bridge_index(z, delta) - 1).max(0);
    let hi = last_bridge_index(z, delta) + 1;
    let bridges = IntervalSet::from_parts((lo..=hi).map(|k| {
        let k = Rational::from(k);
        Interval::open((&k - delta) / z, (&k + delta) / z).expect("delta > 0")
    }));
    let k0 = IntervalSet::closed(delta.clone(), Rational::one() - delta);
    let measure = bridges.intersect(&k0).measure();
    let bound = measure_bound(delta);
    Ok(MeasureReport {
        z: z.clone(),
        delta: delta.clone(),
        tight: measure == bound,
        measure,
        bound,
    })
}

/// `z,measure` rows for `z = from + i·(to−from)/steps`, `i = 0..=steps`.
pub fn measure_curve_csv(
    delta: &Rational,
    from: &Rational,
    to: &Rational,
    steps: u32,
) -> Result<String> {
    if steps == 0 || to < from {
        return Err(param("need a nonempty range and at least one step"));
    }
    let step = (to - from) / Rational::from(steps as i64);
    let mut out = String::from("z,measure\n");
    for i in 0..=steps {
        let z = from + &step * Rational::from(i as i64);
        let r = k0_measure(&z, delta)?;
        out.push_str(&format!("{},{}\n", z, r.measure));
    }
    Ok(out)
}

/// Bounds `1/(2d+1) ≤ Δ¹_d ≤ 1/(d+2)` on the one-round gap of loneliness.
pub fn gap_bounds(d: usize) -> Result<(Rational, Rational)> {
    if d == 0 {
        return Err(param("dimension must be positive"));
    }
    let d = d as i64;
    Ok((Rational::frac(1, 2 * d + 1), Rational::frac(1, d + 2)))
}

/// Verdicts on `z_ε` for one and two rounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub eps: Vec<Rational>,
    pub z: Vec<Rational>,
    pub residual_one_round: IntervalSet,
    pub residual_two_rounds: IntervalSet,
    /// Least `λ` covering `z_ε` within two rounds.
    pub witness_two_rounds: Option<Rational>,
    /// Whether the lattice search for one round also finds nothing.
    pub beam_empty_one_round: bool,
    /// Candidate ranges `[⌈δz_i+δ−1⌉, ⌊(1−δ)z_i−δ⌋]` for the first round.
    pub candidate_ranges: Vec<(i64, i64)>,
}

impl CounterexampleReport {
    /// Not covered in one round, covered in two.
    pub fn separates(&self) -> bool {
        self.residual_one_round.is_empty()
            && self.beam_empty_one_round
            && !self.residual_two_rounds.is_empty()
    }
}

/// `z_ε = (13(1−ε₁)/5, 3211(1−ε₂)/935, 247(1−ε₃)/55, 61009(1−ε₄)/10285)`.
pub fn counterexample_point(eps: &[Rational]) -> Result<Vec<Rational>> {
    let [e1, e2, e3, e4] = eps else {
        return Err(param("expected four perturbations"));
    };
    let ordered =
        e1.is_positive() && e1 < e3 && e3 < e2 && e2 < e4 && *e4 < Rational::frac(32, 3211);
    if !ordered {
        return Err(param(
            "perturbations must satisfy 0 < ε₁ < ε₃ < ε₂ < ε₄ < 32/3211",
        ));
    }
    let one = Rational::one();
    Ok(vec![
        Rational::frac(13, 5) * (&one - e1),
        Rational::frac(3211, 935) * (&one - e2),
        Rational::frac(247, 55) * (&one - e3),
        Rational::frac(61009, 10285) * (&one - e4),
    ])
}

/// Checks that `z_ε` escapes one-round covering for `d = 4` but not two-round covering.
pub fn counterexample_verify(eps: &[Rational]) -> Result<CounterexampleReport> {
    let z = counterexample_point(eps)?;
    let one = CoveringConfig::new(4, 1)?;
    let two = CoveringConfig::new(4, 2)?;
    let residual_one_round = membership_residual(&z, &one)?;
    let residual_two_rounds = membership_residual(&z, &two)?;
    let delta = &one.delta;
    let candidate_ranges = z
        .iter()
        .map(|zi| {
            let lo = (delta * zi + delta - 1)
                .ceil()
                .to_i64()
                .expect("small index");
            let hi = ((Rational::one() - delta) * zi - delta)
                .floor()
                .to_i64()
                .expect("small index");
            (lo.max(0), hi)
        })
        .collect();
    Ok(CounterexampleReport {
        eps: eps.to_vec(),
        witness_two_rounds: canonical_witness(&residual_two_rounds),
        beam_empty_one_round: beam_lattice_point(&z, &one)?.is_none(),
        z,
        residual_one_round,
        residual_two_rounds,
        candidate_ranges,
    })
}

/// Runners with speeds `w_i` relative to a static runner and starting points `P_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunnerInstance {
    pub speeds: Vec<Rational>,
    pub starts: Vec<Rational>,
    pub delta: Rational,
    pub horizon: Rational,
}

impl RunnerInstance {
    /// All runners start at the origin.
    pub fn classic(speeds: Vec<Rational>, delta: Rational, horizon: Rational) -> Self {
        let starts = vec![Rational::zero(); speeds.len()];
        RunnerInstance {
            speeds,
            starts,
            delta,
            horizon,
        }
    }
}

/// Start point that makes a forward runner mimic a reversed one.
///
/// The window `[δ, 1−δ]` is symmetric under `x ↦ −x` modulo 1, so
/// `{P − t·w}` lies in it exactly when `{−P + t·w}` does.
pub fn reversed_start(start: &Rational) -> Rational {
    (-start).fract()
}

/// Times `t ∈ (0, T]` with `{P_i + t·w_i} ∈ [δ, 1−δ]` for every runner.
pub fn loneliness_windows(inst: &RunnerInstance) -> Result<IntervalSet> {
    check_delta(&inst.delta)?;
    if !inst.horizon.is_positive() {
        return Err(param("horizon must be positive"));
    }
    if inst.speeds.len() != inst.starts.len() {
        return Err(param("one start per runner"));
    }
    let mut windows = IntervalSet::from_parts(Interval::new(
        Rational::zero(),
        false,
        inst.horizon.clone(),
        true,
    ));
    let upper = Rational::one() - &inst.delta;
    for (w, p) in inst.speeds.iter().zip(&inst.starts) {
        if !w.is_positive() {
            return Err(param(format!("speed {w} must be positive")));
        }
        if p.is_negative() || *p >= 1 {
            return Err(param(format!("start {p} outside [0,1)")));
        }
        let top = (&inst.horizon * w + p)
            .ceil()
            .to_i64()
            .expect("kwai index fits in i64");
        let runner = IntervalSet::from_parts((0..=top).map(|k| {
            let k = Rational::from(k);
            Interval::closed((&k + &inst.delta - p) / w, (&k + &upper - p) / w)
                .expect("delta < 1/2")
        }));
        windows = windows.intersect(&runner);
        if windows.is_empty() {
            break;
        }
    }
    Ok(windows)
}

/// Least `t ∈ (0, N/min w]` with every `{t·w_i}` in `[δ_d, 1−δ_d]`, `d + 1 = len(w)`.
pub fn nd_round_check(w: &[Rational], rounds: usize) -> Result<Option<Rational>> {
    if w.len() < 2 {
        return Err(param("need at least two speeds"));
    }
    nd_round_check_with_delta(w, rounds, &default_delta(w.len() - 1))
}

pub fn nd_round_check_with_delta(
    w: &[Rational],
    rounds: usize,
    delta: &Rational,
) -> Result<Option<Rational>> {
    if rounds == 0 {
        return Err(param("number of rounds must be positive"));
    }
    let slowest = w.iter().min().ok_or_else(|| param("no speeds"))?;
    if !slowest.is_positive() {
        return Err(param("speeds must be positive"));
    }
    let horizon = Rational::from(rounds as i64) / slowest;
    let windows = loneliness_windows(&RunnerInstance::classic(w.to_vec(), delta.clone(), horizon))?;
    Ok(windows.min().cloned())
}

/// Whether `|{tv} − {tv′}| ∈ [δ, 1−δ]` agrees with `{t|v−v′|} ∈ [δ, 1−δ]`.
pub fn fractional_gap_identity_check(
    v: &Rational,
    vp: &Rational,
    t: &Rational,
    delta: &Rational,
) -> Result<bool> {
    check_delta(delta)?;
    if !t.is_positive() {
        return Err(param("time must be positive"));
    }
    let upper = Rational::one() - delta;
    let inside = |x: &Rational| x >= delta && *x <= upper;
    let lhs = ((t * v).fract() - (t * vp).fract()).abs();
    let rhs = (t * (v - vp).abs()).fract();
    Ok(inside(&lhs) == inside(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn measure_examples() {
        let r = k0_measure(&q(5, 1), &q(1, 6)).unwrap();
        assert_eq!(r.measure, q(4, 15));
        assert!(r.tight);
        assert_eq!(k0_measure(&q(1, 1), &q(1, 4)).unwrap().measure, q(0, 1));
        let r = k0_measure(&q(2, 1), &q(1, 4)).unwrap();
        assert_eq!((r.measure, r.bound), (q(1, 4), q(1, 3)));
    }

    #[test]
    fn gap_bound_values() {
        assert_eq!(gap_bounds(1).unwrap(), (q(1, 3), q(1, 3)));
        assert_eq!(gap_bounds(3).unwrap(), (q(1, 7), q(1, 5)));
        assert_eq!(gap_bounds(4).unwrap(), (q(1, 9), q(1, 6)));
        assert!(gap_bounds(0).is_err());
    }

    #[test]
    fn perturbation_order_is_enforced() {
        assert!(counterexample_point(&[q(1, 100), q(1, 100), q(1, 100), q(1, 100)]).is_err());
        assert!(counterexample_point(&[q(1, 1000), q(3, 1000), q(2, 1000), q(32, 3211)]).is_err());
        assert!(counterexample_point(&[q(1, 1000), q(3, 1000), q(2, 1000)]).is_err());
    }

    #[test]
    fn two_runner_window() {
        let inst = RunnerInstance::classic(vec![q(1, 1)], q(1, 3), q(1, 1));
        assert_eq!(loneliness_windows(&inst).unwrap().to_string(), "[1/3,2/3]");
        let bad = RunnerInstance::classic(vec![q(1, 1)], q(1, 3), q(0, 1));
        assert!(loneliness_windows(&bad).is_err());
    }

    #[test]
    fn reversed_start_reflects() {
        assert_eq!(reversed_start(&q(1, 4)), q(3, 4));
        assert_eq!(reversed_start(&q(0, 1)), q(0, 1));
    }

    #[test]
    fn gap_identity_examples() {
        assert!(fractional_gap_identity_check(&q(0, 1), &q(1, 1), &q(1, 2), &q(1, 3)).unwrap());
        assert!(fractional_gap_identity_check(&q(3, 7), &q(12, 5), &q(35, 4), &q(1, 4)).unwrap());
    }
}
