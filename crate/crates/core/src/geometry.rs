//! Kwais, bridges, feathers and beams, and the three equivalent tests for
//! `z ∈ 𝒦^d(δ)/𝒦_⟦0,N−1⟧(δ)`.

use num::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::intervals::{check_delta, Interval, IntervalSet};
use crate::rational::Rational;

/// Dimension, number of rounds and loneliness threshold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveringConfig {
    pub d: usize,
    pub rounds: usize,
    pub delta: Rational,
}

impl CoveringConfig {
    /// Uses the threshold `1/(d+2)`.
    pub fn new(d: usize, rounds: usize) -> Result<Self> {
        Self::with_delta(d, rounds, default_delta(d))
    }

    pub fn with_delta(d: usize, rounds: usize, delta: Rational) -> Result<Self> {
        if d == 0 || rounds == 0 {
            return Err(param("dimension and number of rounds must be positive"));
        }
        check_delta(&delta)?;
        Ok(CoveringConfig { d, rounds, delta })
    }

    pub fn uses_default_delta(&self) -> bool {
        self.delta == default_delta(self.d)
    }
}

/// `δ_d = 1/(d+2)`.
pub fn default_delta(d: usize) -> Rational {
    Rational::frac(1, d as i64 + 2)
}

/// `(k, l)`: the feather `𝒦^d_k(δ)/𝒦_l(δ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FeatherIndex {
    pub k: Vec<u64>,
    pub l: u64,
}

/// The closed kwai `[k+δ, k+1−δ]`.
pub fn kwai(k: i64, delta: &Rational) -> Interval {
    let k = Rational::from(k);
    Interval::closed(&k + delta, &k + 1 - delta).expect("delta < 1/2")
}

/// The open bridge `(k−δ, k+δ)`.
pub fn bridge(k: i64, delta: &Rational) -> Interval {
    let k = Rational::from(k);
    Interval::open(&k - delta, &k + delta).expect("delta > 0")
}

/// `𝒦_⟦0,N−1⟧(δ)`.
pub fn kwai_union(rounds: usize, delta: &Rational) -> IntervalSet {
    IntervalSet::from_parts((0..rounds as i64).map(|k| kwai(k, delta)))
}

/// `ℬ(δ)/z` restricted to the bridges that can meet `[δ, N−δ]`.
pub fn scaled_bridges(z: &Rational, rounds: usize, delta: &Rational) -> IntervalSet {
    let top = (z * (rounds as i64) - z * delta + delta).floor();
    let top = top.to_i64().expect("bridge index fits in i64");
    IntervalSet::from_parts((0..=top).map(|k| {
        let b = bridge(k, delta);
        Interval::open(b.lo() / z, b.hi() / z).unwrap()
    }))
}

fn check_speeds(z: &[Rational]) -> Result<()> {
    if z.is_empty() {
        return Err(param("empty speed vector"));
    }
    if let Some(bad) = z.iter().find(|zi| **zi < 1) {
        return Err(param(format!("speed ratio {bad} below 1")));
    }
    Ok(())
}

/// `𝒦_⟦0,N−1⟧(δ) ∖ ∪ᵢ ℬ(δ)/zᵢ`; nonempty iff `z` is covered.
pub fn membership_residual(z: &[Rational], config: &CoveringConfig) -> Result<IntervalSet> {
    check_speeds(z)?;
    let mut residual = kwai_union(config.rounds, &config.delta);
    for zi in z {
        if residual.is_empty() {
            break;
        }
        residual = residual.subtract(&scaled_bridges(zi, config.rounds, &config.delta));
    }
    Ok(residual)
}

/// The left endpoint of the first residual component.
pub fn canonical_witness(residual: &IntervalSet) -> Option<Rational> {
    residual.min().cloned()
}

/// Whether `λ` lies in `𝒦_⟦0,N−1⟧(δ)` and every `λ·zᵢ` lies in some kwai.
pub fn is_witness(lambda: &Rational, z: &[Rational], config: &CoveringConfig) -> bool {
    let in_kwai = |x: &Rational| {
        let frac = x.fract();
        x.is_positive() && frac >= config.delta && frac <= Rational::one() - &config.delta
    };
    in_kwai(lambda) && *lambda < config.rounds as i64 && z.iter().all(|zi| in_kwai(&(lambda * zi)))
}

/// Membership of `z` in the feather `F_{k,l}(δ)`.
pub fn feather_contains(z: &[Rational], f: &FeatherIndex, delta: &Rational) -> bool {
    if z.len() != f.k.len() {
        return false;
    }
    let l = Rational::from(f.l as i64);
    let lo_den = &l + 1 - delta;
    let hi_den = &l + delta;
    let lows: Vec<Rational> =
        f.k.iter()
            .map(|&k| Rational::from(k as i64) + delta)
            .collect();
    let highs: Vec<Rational> =
        f.k.iter()
            .map(|&k| Rational::from(k as i64) + 1 - delta)
            .collect();
    let in_box = z
        .iter()
        .enumerate()
        .all(|(i, zi)| &lows[i] / &lo_den <= *zi && *zi <= &highs[i] / &hi_den);
    in_box
        && (0..z.len())
            .all(|i| (0..z.len()).all(|j| i == j || &z[i] / &lows[i] >= &z[j] / &highs[j]))
}

/// The hyperplane constants `(kᵢ+δ)/(l+1−δ)` of the lower face, 1-based.
pub fn feather_lower_face(f: &FeatherIndex, delta: &Rational) -> Vec<(usize, Rational)> {
    let den = Rational::from(f.l as i64) + 1 - delta;
    f.k.iter()
        .enumerate()
        .map(|(i, &k)| (i + 1, (Rational::from(k as i64) + delta) / &den))
        .collect()
}

pub fn on_feather_lower_face(z: &[Rational], f: &FeatherIndex, delta: &Rational) -> bool {
    feather_contains(z, f, delta)
        && feather_lower_face(f, delta)
            .iter()
            .any(|(i, c)| z[i - 1] == *c)
}

/// Range of admissible `kᵢ` in round `l`: `[⌈(l+δ)z+δ−1⌉, ⌊(l+1−δ)z−δ⌋] ∩ ℕ`.
fn beam_range(z: &Rational, l: i64, delta: &Rational) -> Option<(i64, i64)> {
    let l = Rational::from(l);
    let lo = ((&l + delta) * z + delta - 1).ceil().to_i64()?.max(0);
    let hi = ((&l + 1 - delta) * z - delta).floor().to_i64()?;
    (lo <= hi).then_some((lo, hi))
}

fn cross_ok(zi: &Rational, ki: i64, zj: &Rational, kj: i64, delta: &Rational) -> bool {
    // kⱼzᵢ − kᵢzⱼ ≥ (δ−1)zᵢ + δzⱼ
    let lhs = zi * kj - zj * ki;
    lhs >= (delta - 1) * zi + delta * zj
}

/// First lattice point of the beam, `l` ascending then `k` lexicographic.
pub fn beam_lattice_point(z: &[Rational], config: &CoveringConfig) -> Result<Option<FeatherIndex>> {
    check_speeds(z)?;
    let delta = &config.delta;
    for l in 0..config.rounds as i64 {
        let ranges: Option<Vec<(i64, i64)>> = z.iter().map(|zi| beam_range(zi, l, delta)).collect();
        let Some(ranges) = ranges else { continue };
        let mut k = Vec::with_capacity(z.len());
        if beam_search(z, &ranges, delta, &mut k) {
            return Ok(Some(FeatherIndex {
                k: k.iter().map(|&x| x as u64).collect(),
                l: l as u64,
            }));
        }
    }
    Ok(None)
}

fn beam_search(z: &[Rational], ranges: &[(i64, i64)], delta: &Rational, k: &mut Vec<i64>) -> bool {
    let i = k.len();
    if i == z.len() {
        return true;
    }
    for ki in ranges[i].0..=ranges[i].1 {
        let consistent = (0..i).all(|j| {
            cross_ok(&z[i], ki, &z[j], k[j], delta) && cross_ok(&z[j], k[j], &z[i], ki, delta)
        });
        if consistent {
            k.push(ki);
            if beam_search(z, ranges, delta, k) {
                return true;
            }
            k.pop();
        }
    }
    false
}

/// Brute-force search for a feather containing `z`, testing `feather_contains`
/// over the box `kᵢ ≤ ⌈N·zᵢ⌉`, `l < N`.
pub fn find_feather(z: &[Rational], config: &CoveringConfig) -> Result<Option<FeatherIndex>> {
    check_speeds(z)?;
    for l in 0..config.rounds as u64 {
        let bounds: Vec<u64> = z
            .iter()
            .map(|zi| {
                (zi * (config.rounds as i64))
                    .ceil()
                    .to_u64()
                    .unwrap_or(u64::MAX)
            })
            .collect();
        let mut k = vec![0u64; z.len()];
        loop {
            let f = FeatherIndex { k: k.clone(), l };
            if feather_contains(z, &f, &config.delta) {
                return Ok(Some(f));
            }
            // odometer over the box
            let mut pos = 0;
            loop {
                if pos == k.len() {
                    break;
                }
                if k[pos] < bounds[pos] {
                    k[pos] += 1;
                    break;
                }
                k[pos] = 0;
                pos += 1;
            }
            if pos == k.len() {
                break;
            }
        }
    }
    Ok(None)
}

/// Lower bound on the longest closed interval inside `𝒦₀(δ) ∖ ℬ(δ)/z`.
pub fn residual_kwai_guarantee(z: &Rational, delta: &Rational) -> Result<Rational> {
    check_delta(delta)?;
    if *delta > Rational::frac(1, 4) {
        return Err(Error::Unsupported(format!("delta {delta} exceeds 1/4")));
    }
    if *z < 1 {
        return Err(param(format!("speed ratio {z} below 1")));
    }
    let threshold = (Rational::from(2) - delta) / (Rational::one() - delta);
    if *z >= threshold {
        Ok((Rational::one() - delta * 2) / z)
    } else {
        Ok((Rational::one() - delta) / z - delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn zs(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(a, b)| q(a, b)).collect()
    }

    #[test]
    fn feather_examples() {
        let f = FeatherIndex {
            k: vec![2, 1],
            l: 0,
        };
        assert!(feather_contains(&zs(&[(4, 1), (2, 1)]), &f, &q(1, 4)));
        assert!(!feather_contains(&zs(&[(12, 1), (2, 1)]), &f, &q(1, 4)));
        let ones = FeatherIndex {
            k: vec![0, 0, 0],
            l: 0,
        };
        assert!(feather_contains(&zs(&[(1, 1); 3]), &ones, &q(1, 3)));
        assert_eq!(
            feather_lower_face(&f, &q(1, 4)),
            vec![(1, q(3, 1)), (2, q(5, 3))]
        );
        let zero = FeatherIndex {
            k: vec![0, 0],
            l: 0,
        };
        assert_eq!(
            feather_lower_face(&zero, &q(1, 3)),
            vec![(1, q(1, 2)), (2, q(1, 2))]
        );
        assert!(on_feather_lower_face(&zs(&[(3, 1), (2, 1)]), &f, &q(1, 4)));
        assert!(!on_feather_lower_face(&zs(&[(4, 1), (2, 1)]), &f, &q(1, 4)));
    }

    #[test]
    fn residual_examples() {
        let cfg = CoveringConfig::with_delta(2, 1, q(1, 4)).unwrap();
        let r = membership_residual(&zs(&[(1, 1), (1, 1)]), &cfg).unwrap();
        assert_eq!(r.to_string(), "[1/4,3/4]");
        let r = membership_residual(&zs(&[(2, 1), (3, 1)]), &cfg).unwrap();
        assert_eq!(r.to_string(), "{1/4} {3/4}");
        assert!(r.contains(&q(3, 4)));
        assert_eq!(canonical_witness(&r), Some(q(1, 4)));
        assert!(membership_residual(&zs(&[(1, 2), (2, 1)]), &cfg).is_err());
    }

    #[test]
    fn beam_examples() {
        let cfg = CoveringConfig::with_delta(2, 1, q(1, 4)).unwrap();
        let p = beam_lattice_point(&zs(&[(2, 1), (3, 1)]), &cfg)
            .unwrap()
            .unwrap();
        // lexicographic search finds (0,0) first, the witness λ = 1/4
        assert_eq!(
            p,
            FeatherIndex {
                k: vec![0, 0],
                l: 0
            }
        );
        let alt = FeatherIndex {
            k: vec![1, 2],
            l: 0,
        };
        assert!(feather_contains(&zs(&[(2, 1), (3, 1)]), &alt, &q(1, 4)));
        let p = beam_lattice_point(&zs(&[(1, 1), (1, 1)]), &cfg)
            .unwrap()
            .unwrap();
        assert_eq!(
            p,
            FeatherIndex {
                k: vec![0, 0],
                l: 0
            }
        );
    }

    #[test]
    fn kwai_guarantee_examples() {
        assert_eq!(
            residual_kwai_guarantee(&q(3, 1), &q(1, 4)).unwrap(),
            q(1, 6)
        );
        assert_eq!(
            residual_kwai_guarantee(&q(1, 1), &q(1, 4)).unwrap(),
            q(1, 2)
        );
        assert_eq!(
            residual_kwai_guarantee(&q(2, 1), &q(1, 6)).unwrap(),
            q(1, 4)
        );
        assert!(matches!(
            residual_kwai_guarantee(&q(2, 1), &q(1, 3)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn config_rejects_bad_delta() {
        assert!(CoveringConfig::with_delta(2, 1, q(1, 2)).is_err());
        assert!(CoveringConfig::with_delta(2, 1, q(0, 1)).is_err());
        assert!(CoveringConfig::with_delta(2, 1, q(-1, 3)).is_err());
        assert_eq!(CoveringConfig::new(4, 1).unwrap().delta, q(1, 6));
    }
}
