//! Exact entropy solutions for decreasing step data by front tracking.

use crate::error::{Error, Result};
use crate::flux::ConvexFlux;
use crate::step::StepFunction;

/// Rankine-Hugoniot speed of the admissible shock `u_left > u_right`.
pub fn shock_speed(u_left: f64, u_right: f64, f: &ConvexFlux) -> Result<f64> {
    if !(u_left > u_right) {
        return Err(Error::NotAShock {
            left: u_left,
            right: u_right,
        });
    }
    Ok((f.eval(u_left) - f.eval(u_right)) / (u_left - u_right))
}

/// Shock positions, intermediate states and speeds at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontState {
    time: f64,
    positions: Vec<f64>,
    values: Vec<f64>,
    speeds: Vec<f64>,
}

impl FrontState {
    pub fn new(u0: &StepFunction, f: &ConvexFlux, time: f64) -> Result<Self> {
        if !u0.is_decreasing() {
            return Err(Error::NotDecreasing);
        }
        let values = u0.values().to_vec();
        let speeds = values
            .windows(2)
            .map(|w| shock_speed(w[0], w[1], f))
            .collect::<Result<_>>()?;
        Ok(Self {
            time,
            positions: u0.breakpoints().to_vec(),
            values,
            speeds,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }

    pub fn num_shocks(&self) -> usize {
        self.positions.len()
    }

    pub fn to_step(&self) -> StepFunction {
        StepFunction::new(self.positions.clone(), self.values.clone())
            .expect("front positions stay strictly increasing")
    }

    /// Collision time of shocks `k` and `k + 1`, relative to `self.time`.
    fn pair_collision(&self, k: usize) -> Option<f64> {
        let closing = self.speeds[k] - self.speeds[k + 1];
        (closing > 0.0).then(|| (self.positions[k + 1] - self.positions[k]) / closing)
    }

    fn advance_linear(&mut self, dt: f64) {
        for (x, d) in self.positions.iter_mut().zip(&self.speeds) {
            *x += d * dt;
        }
        self.time += dt;
    }
}

/// Time until the next shock interaction, measured from `state.time()`.
pub fn first_interaction_time(state: &FrontState) -> Option<f64> {
    (0..state.num_shocks().saturating_sub(1))
        .filter_map(|k| state.pair_collision(k))
        .min_by(|a, b| a.total_cmp(b))
}

/// Advances `state` by `dt`, merging shocks at every interaction.
pub fn advance(state: &FrontState, f: &ConvexFlux, dt: f64) -> Result<FrontState> {
    if !(dt >= 0.0) {
        return Err(Error::Config(format!("negative time increment {dt}")));
    }
    let mut s = state.clone();
    let target = s.time + dt;
    let time_tol = 1e-13 * target.abs().max(1.0);
    loop {
        let remaining = target - s.time;
        let collisions: Vec<Option<f64>> = (0..s.num_shocks().saturating_sub(1))
            .map(|k| s.pair_collision(k))
            .collect();
        let next = collisions
            .iter()
            .flatten()
            .copied()
            .min_by(|a, b| a.total_cmp(b));
        let tau = match next {
            Some(tau) if tau <= remaining + time_tol => tau,
            _ => {
                s.advance_linear(remaining.max(0.0));
                s.time = target;
                return Ok(s);
            }
        };

        // Every pair meeting within the tie tolerance of `tau` collides now.
        let meets: Vec<bool> = collisions
            .iter()
            .map(|c| matches!(c, Some(c) if *c <= tau + time_tol))
            .collect();
        let merge_at: Vec<f64> = (0..meets.len())
            .map(|k| {
                0.5 * (s.positions[k] + s.positions[k + 1] + tau * (s.speeds[k] + s.speeds[k + 1]))
            })
            .collect();
        s.advance_linear(tau);

        let mut positions = Vec::with_capacity(s.num_shocks());
        let mut values = vec![s.values[0]];
        let mut k = 0;
        while k < s.num_shocks() {
            let start = k;
            while k < meets.len() && meets[k] {
                k += 1;
            }
            positions.push(if k > start {
                merge_at[start]
            } else {
                s.positions[k]
            });
            values.push(s.values[k + 1]);
            k += 1;
        }
        let speeds = values
            .windows(2)
            .map(|w| shock_speed(w[0], w[1], f))
            .collect::<Result<_>>()?;
        s.positions = positions;
        s.values = values;
        s.speeds = speeds;
        if s.positions.windows(2).any(|w| w[0] >= w[1]) {
            // Rounding can leave a near-coincident pair ordered wrongly; such a
            // pair is colliding and is merged on the next pass.
            for k in 1..s.positions.len() {
                if s.positions[k] < s.positions[k - 1] {
                    s.positions[k] = s.positions[k - 1];
                }
            }
        }
    }
}

/// Exact entropy solution `u(., t)` for decreasing step data `u0`.
pub fn evolve(u0: &StepFunction, f: &ConvexFlux, t: f64) -> Result<StepFunction> {
    if !(t >= 0.0) {
        return Err(Error::Config(format!("negative time {t}")));
    }
    let state = FrontState::new(u0, f, 0.0)?;
    if t == 0.0 {
        return Ok(u0.clone());
    }
    Ok(advance(&state, f, t)?.to_step())
}

/// Total variation of a step function.
pub fn tv(u: &StepFunction) -> f64 {
    u.tv()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numinitialcond() -> StepFunction {
        StepFunction::new(vec![0.25, 0.5], vec![2.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn burgers_speeds() {
        let f = ConvexFlux::burgers();
        assert_eq!(shock_speed(2.0, 1.0, &f).unwrap(), 1.5);
        assert_eq!(shock_speed(1.0, 0.0, &f).unwrap(), 0.5);
        assert_eq!(shock_speed(2.0, 0.0, &f).unwrap(), 1.0);
        assert!(matches!(
            shock_speed(0.0, 1.0, &f),
            Err(Error::NotAShock { .. })
        ));
    }

    #[test]
    fn interaction_times() {
        let f = ConvexFlux::burgers();
        let s = FrontState::new(&numinitialcond(), &f, 0.0).unwrap();
        assert_eq!(first_interaction_time(&s), Some(0.25));
        let one =
            FrontState::new(&StepFunction::heaviside(0.0, 1.0, 0.0).unwrap(), &f, 0.0).unwrap();
        assert_eq!(first_interaction_time(&one), None);
        let three = StepFunction::new(vec![0.0, 0.1, 0.2], vec![3.0, 2.0, 1.0, 0.0]).unwrap();
        let s3 = FrontState::new(&three, &f, 0.0).unwrap();
        assert!((first_interaction_time(&s3).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn evolve_numinitialcond() {
        let f = ConvexFlux::burgers();
        let u = evolve(&numinitialcond(), &f, 0.15).unwrap();
        assert_eq!(u.values(), &[2.0, 1.0, 0.0]);
        assert!((u.breakpoints()[0] - 0.475).abs() < 1e-15);
        assert!((u.breakpoints()[1] - 0.575).abs() < 1e-15);

        let u = evolve(&numinitialcond(), &f, 0.3).unwrap();
        assert_eq!(u.values(), &[2.0, 0.0]);
        assert!((u.breakpoints()[0] - 0.675).abs() < 1e-15);
        assert_eq!(tv(&u), 2.0);

        assert_eq!(
            evolve(&numinitialcond(), &f, 0.0).unwrap(),
            numinitialcond()
        );
    }

    #[test]
    fn triple_collision_merges_once() {
        let f = ConvexFlux::burgers();
        // speeds 2.5, 1.5, 0.5 all meet at x = 0.25, t = 0.1
        let u0 = StepFunction::new(vec![0.0, 0.1, 0.2], vec![3.0, 2.0, 1.0, 0.0]).unwrap();
        let u = evolve(&u0, &f, 0.1).unwrap();
        assert_eq!(u.num_jumps(), 1);
        assert!((u.breakpoints()[0] - 0.25).abs() < 1e-14);
        let later = evolve(&u0, &f, 0.3).unwrap();
        assert!((later.breakpoints()[0] - (0.25 + 0.2 * 1.5)).abs() < 1e-14);
    }

    #[test]
    fn rejects_increasing_data() {
        let f = ConvexFlux::burgers();
        let u0 = StepFunction::heaviside(0.0, 0.0, 1.0).unwrap();
        assert!(matches!(evolve(&u0, &f, 0.1), Err(Error::NotDecreasing)));
    }
}
