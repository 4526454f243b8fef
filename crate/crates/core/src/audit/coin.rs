//! Monte Carlo simulators for the two adaptive tail processes behind the
//! set cover and submodular privacy proofs.

use crate::error::{invalid, Result};
use crate::rng::RngStream;

/// Adaptive coin process. In round `i` the policy picks `p_i` (it may use
/// the round index and its own state), a coin with heads probability
/// `p_i` is tossed, and `Y` gains `p_i` while no coin so far, this one
/// included, has come up heads. Returns the fraction of trials with
/// `Y > q`, to be compared with `exp(-q)`.
pub fn simulate_coin_tail<P>(
    mut policy: P,
    n: usize,
    q: f64,
    trials: usize,
    rng: &mut RngStream,
) -> Result<f64>
where
    P: FnMut(usize) -> f64,
{
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    let mut hits = 0usize;
    for _ in 0..trials {
        let mut y = 0.0;
        for i in 0..n {
            let p = policy(i);
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(
                    "policy",
                    format!("head probability {p} outside [0, 1]"),
                ));
            }
            if rng.uniform() < p {
                break;
            }
            y += p;
        }
        hits += usize::from(y > q);
    }
    Ok(hits as f64 / trials as f64)
}

/// Adaptive fraction process. In round `i` the policy returns a draw `R_i`
/// in `[0, 1]` together with its mean; `Y` gains `Z_i E[R_i]` and then
/// `Z_{i+1} = (1 - R_i) Z_i`, starting from `Z_1 = 1`. Returns the
/// fraction of trials with `Y > q`, to be compared with `e exp(-q)`.
pub fn simulate_fraction_tail<P>(
    mut policy: P,
    n: usize,
    q: f64,
    trials: usize,
    rng: &mut RngStream,
) -> Result<f64>
where
    P: FnMut(usize, &mut RngStream) -> (f64, f64),
{
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    let mut hits = 0usize;
    for _ in 0..trials {
        let mut z = 1.0;
        let mut y = 0.0;
        for i in 0..n {
            let (r, mean) = policy(i, rng);
            if !(0.0..=1.0).contains(&r) || !(0.0..=1.0).contains(&mean) {
                return Err(invalid("policy", "draws and means must lie in [0, 1]"));
            }
            y += z * mean;
            z *= 1.0 - r;
        }
        hits += usize::from(y > q);
    }
    Ok(hits as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma(p: f64, trials: usize) -> f64 {
        (p * (1.0 - p) / trials as f64).sqrt()
    }

    #[test]
    fn coin_degenerate_policies() {
        let mut rng = RngStream::new(0, 0);
        assert_eq!(
            simulate_coin_tail(|_| 0.0, 50, 0.0, 1000, &mut rng).unwrap(),
            0.0
        );
        assert_eq!(
            simulate_coin_tail(|_| 1.0, 50, 0.0, 1000, &mut rng).unwrap(),
            0.0
        );
        assert!(simulate_coin_tail(|_| 1.5, 5, 0.0, 10, &mut rng).is_err());
    }

    #[test]
    fn coin_tail_bound() {
        let mut rng = RngStream::new(1, 0);
        let trials = 100_000;
        for q in [2.0, 3.0] {
            let f = simulate_coin_tail(|_| 0.2, 50, q, trials, &mut rng).unwrap();
            let b = (-q).exp();
            assert!(f <= b + 3.0 * sigma(b, trials), "q={q}: {f}");
        }
    }

    #[test]
    fn coin_adaptive_policy() {
        // a policy that ramps up still respects the bound
        let mut rng = RngStream::new(2, 0);
        let trials = 50_000;
        let f =
            simulate_coin_tail(|i| (0.02 * i as f64).min(1.0), 60, 2.0, trials, &mut rng).unwrap();
        let b = (-2.0f64).exp();
        assert!(f <= b + 3.0 * sigma(b, trials));
    }

    #[test]
    fn fraction_degenerate_policies() {
        let mut rng = RngStream::new(3, 0);
        assert_eq!(
            simulate_fraction_tail(|_, _| (0.0, 0.0), 50, 0.0, 100, &mut rng).unwrap(),
            0.0
        );
        assert_eq!(
            simulate_fraction_tail(|_, _| (1.0, 1.0), 50, 1.0, 100, &mut rng).unwrap(),
            0.0
        );
        assert_eq!(
            simulate_fraction_tail(|_, _| (1.0, 1.0), 50, 0.99, 100, &mut rng).unwrap(),
            1.0
        );
    }

    #[test]
    fn fraction_tail_bound() {
        let mut rng = RngStream::new(4, 0);
        let trials = 100_000;
        let f =
            simulate_fraction_tail(|_, r| (r.uniform(), 0.5), 50, 4.0, trials, &mut rng).unwrap();
        let b = std::f64::consts::E * (-4.0f64).exp();
        assert!(f <= b + 3.0 * sigma(b, trials), "{f}");
    }
}
