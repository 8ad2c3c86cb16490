use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Presentation {
    #[default]
    RoundRobin,
    Uniform,
}

/// How the reward map changes at a policy switch. Both rules are
/// derangements: the previously rewarded action is never rewarded right
/// after a switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchRule {
    #[default]
    RandomDerangement,
    /// Action `a` becomes `a + 1 mod n`.
    Cyclic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    pub percepts: usize,
    pub actions: usize,
    /// Rewarded action per percept.
    pub reward_map: Vec<usize>,
    /// External steps between policy switches; 0 keeps the map fixed.
    #[serde(default)]
    pub switch_period: u64,
    /// Internal operations the environment waits per decision; 0 waits
    /// forever.
    #[serde(default)]
    pub time_budget: u64,
    #[serde(default)]
    pub presentation: Presentation,
    #[serde(default)]
    pub switch_rule: SwitchRule,
    #[serde(default)]
    pub seed: u64,
}

impl EnvironmentSpec {
    /// Percept `s` rewards action `s mod actions`.
    pub fn new(percepts: usize, actions: usize) -> Self {
        Self {
            percepts,
            actions,
            reward_map: (0..percepts).map(|s| s % actions.max(1)).collect(),
            switch_period: 0,
            time_budget: 0,
            presentation: Presentation::RoundRobin,
            switch_rule: SwitchRule::RandomDerangement,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.percepts == 0 || self.actions == 0 {
            return Err(Error::InvalidInput("environment needs percepts and actions".into()));
        }
        if self.reward_map.len() != self.percepts {
            return Err(Error::DimensionMismatch { expected: self.percepts, got: self.reward_map.len() });
        }
        if let Some(&a) = self.reward_map.iter().find(|&&a| a >= self.actions) {
            return Err(Error::InvalidInput(format!("rewarded action {a} out of range")));
        }
        if self.switch_period > 0 && self.actions < 2 {
            return Err(Error::InvalidInput("policy switches need at least two actions".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Environment {
    spec: EnvironmentSpec,
    map: Vec<usize>,
    percept: usize,
    steps: u64,
    rng: ChaCha8Rng,
}

impl Environment {
    pub fn new(spec: EnvironmentSpec) -> Result<Self> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let percept = match spec.presentation {
            Presentation::RoundRobin => 0,
            Presentation::Uniform => rng.gen_range(0..spec.percepts),
        };
        Ok(Self { map: spec.reward_map.clone(), spec, percept, steps: 0, rng })
    }

    pub fn spec(&self) -> &EnvironmentSpec {
        &self.spec
    }

    pub fn percept(&self) -> usize {
        self.percept
    }

    pub fn reward_map(&self) -> &[usize] {
        &self.map
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Rewards `action` for the current percept, then advances the clock
    /// (switching policy when due) and presents the next percept.
    pub fn step(&mut self, action: usize) -> Result<(u8, usize)> {
        if action >= self.spec.actions {
            return Err(Error::InvalidInput(format!("action {action} out of range")));
        }
        let reward = u8::from(self.map[self.percept] == action);
        Ok((reward, self.advance()))
    }

    /// The agent ran out of time: a uniformly random action is taken on its
    /// behalf and nothing is rewarded.
    pub fn time_out(&mut self) -> (usize, usize) {
        let action = self.rng.gen_range(0..self.spec.actions);
        (action, self.advance())
    }

    fn advance(&mut self) -> usize {
        self.steps += 1;
        if self.spec.switch_period > 0 && self.steps.is_multiple_of(self.spec.switch_period) {
            let sigma = self.derangement();
            for a in self.map.iter_mut() {
                *a = sigma[*a];
            }
        }
        self.percept = match self.spec.presentation {
            Presentation::RoundRobin => (self.percept + 1) % self.spec.percepts,
            Presentation::Uniform => self.rng.gen_range(0..self.spec.percepts),
        };
        self.percept
    }

    fn derangement(&mut self) -> Vec<usize> {
        let n = self.spec.actions;
        match self.spec.switch_rule {
            SwitchRule::Cyclic => (0..n).map(|a| (a + 1) % n).collect(),
            SwitchRule::RandomDerangement => {
                let mut sigma: Vec<usize> = (0..n).collect();
                loop {
                    sigma.shuffle(&mut self.rng);
                    if sigma.iter().enumerate().all(|(a, &b)| a != b) {
                        return sigma;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_environment_rewards_mapped_action() {
        let mut env = Environment::new(EnvironmentSpec::new(2, 3)).unwrap();
        assert_eq!(env.percept(), 0);
        assert_eq!(env.step(0).unwrap(), (1, 1));
        assert_eq!(env.step(0).unwrap(), (0, 0));
        assert!(env.step(3).is_err());
    }

    #[test]
    fn cyclic_switch_follows_script() {
        let mut spec = EnvironmentSpec::new(1, 3);
        spec.switch_period = 1;
        spec.switch_rule = SwitchRule::Cyclic;
        let mut env = Environment::new(spec).unwrap();
        let script = [0usize, 1, 2, 0, 1];
        for (t, &rewarded) in script.iter().enumerate() {
            assert_eq!(env.reward_map()[0], rewarded, "step {t}");
            let (r, _) = env.step(rewarded).unwrap();
            assert_eq!(r, 1);
        }
    }

    #[test]
    fn random_switches_never_repeat_the_rewarded_action() {
        let mut spec = EnvironmentSpec::new(3, 4);
        spec.switch_period = 2;
        spec.seed = 5;
        let mut env = Environment::new(spec).unwrap();
        let mut before = env.reward_map().to_vec();
        for t in 1..=40 {
            env.step(0).unwrap();
            let now = env.reward_map().to_vec();
            if t % 2 == 0 {
                assert!(before.iter().zip(&now).all(|(a, b)| a != b));
            } else {
                assert_eq!(before, now);
            }
            before = now;
        }
    }

    #[test]
    fn uniform_presentation_is_seeded() {
        let mut spec = EnvironmentSpec::new(5, 2);
        spec.presentation = Presentation::Uniform;
        spec.seed = 3;
        let run = |spec: EnvironmentSpec| {
            let mut env = Environment::new(spec).unwrap();
            (0..30).map(|_| env.step(0).unwrap().1).collect::<Vec<_>>()
        };
        let a = run(spec.clone());
        assert_eq!(a, run(spec));
        assert!(a.iter().any(|&p| p != a[0]));
    }

    #[test]
    fn time_out_gives_no_reward_and_advances() {
        let mut env = Environment::new(EnvironmentSpec::new(2, 2)).unwrap();
        let (action, next) = env.time_out();
        assert!(action < 2);
        assert_eq!(next, 1);
        assert_eq!(env.steps(), 1);
    }
}
