use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{dim, invalid, Error, Result};

/// Tolerance on "sums to one" for strategies and joint distributions.
pub const PROB_TOL: f64 = 1e-12;

/// Compensated (Neumaier) summation; distributions with 10^5+ equal
/// components must still sum to one within [`PROB_TOL`].
pub(crate) fn stable_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// A distribution over one player's actions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MixedStrategy {
    probs: Vec<f64>,
}

impl MixedStrategy {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(invalid("empty mixed strategy"));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(invalid(format!("probability {p} is negative or not finite")));
        }
        let total = stable_sum(probs.iter().copied());
        if (total - 1.0).abs() > PROB_TOL {
            return Err(invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(MixedStrategy { probs })
    }

    /// Normalise nonnegative weights into a strategy.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total = stable_sum(weights.iter().copied());
        if !(total > 0.0) || !total.is_finite() {
            return Err(invalid(format!("weights sum to {total}")));
        }
        MixedStrategy::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn pure(num_actions: usize, action: usize) -> Self {
        assert!(action < num_actions, "action {action} out of range {num_actions}");
        let mut probs = vec![0.0; num_actions];
        probs[action] = 1.0;
        MixedStrategy { probs }
    }

    pub fn uniform(num_actions: usize) -> Self {
        assert!(num_actions > 0);
        MixedStrategy {
            probs: vec![1.0 / num_actions as f64; num_actions],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn prob(&self, action: usize) -> f64 {
        self.probs[action]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.probs.len()).filter(|&a| self.probs[a] > 0.0).collect()
    }

    pub fn is_pure(&self) -> Option<usize> {
        let support = self.support();
        (support.len() == 1).then(|| support[0])
    }

    /// Inverse-CDF draw. Floating-point leftovers fall on the last
    /// action with positive probability.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last = 0;
        for (a, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last = a;
                if u < acc {
                    return a;
                }
            }
        }
        last
    }

    /// Zero out every action with probability `<= threshold` and renormalise.
    pub fn clipped(&self, threshold: f64) -> Result<MixedStrategy> {
        let kept: Vec<f64> = self
            .probs
            .iter()
            .map(|&p| if p <= threshold { 0.0 } else { p })
            .collect();
        if kept.iter().all(|&p| p == 0.0) {
            return Err(Error::Config(format!(
                "clip threshold {threshold} removes every action of {:?}",
                self.probs
            )));
        }
        MixedStrategy::from_weights(kept)
    }

    /// Mass on the given action set.
    pub fn mass_on(&self, actions: impl IntoIterator<Item = usize>) -> f64 {
        actions.into_iter().map(|a| self.probs[a]).sum()
    }
}

impl TryFrom<Vec<f64>> for MixedStrategy {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        MixedStrategy::new(v)
    }
}

impl From<MixedStrategy> for Vec<f64> {
    fn from(s: MixedStrategy) -> Vec<f64> {
        s.probs
    }
}

/// One term of a [`JointDistribution`]: an independent product strategy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductComponent {
    pub weight: f64,
    pub strategies: Vec<MixedStrategy>,
}

/// A correlated strategy stored as a weighted mixture of product strategies.
///
/// This is the form the Hedge learners produce (the average of per-round
/// product strategies); a fully correlated distribution over pure profiles
/// is the special case of point-mass components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJoint", into = "RawJoint")]
pub struct JointDistribution {
    components: Vec<ProductComponent>,
}

#[derive(Serialize, Deserialize)]
struct RawJoint {
    components: Vec<ProductComponent>,
}

impl TryFrom<RawJoint> for JointDistribution {
    type Error = Error;

    fn try_from(raw: RawJoint) -> Result<Self> {
        JointDistribution::new(raw.components)
    }
}

impl From<JointDistribution> for RawJoint {
    fn from(j: JointDistribution) -> RawJoint {
        RawJoint {
            components: j.components,
        }
    }
}

impl JointDistribution {
    pub fn new(components: Vec<ProductComponent>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| invalid("joint distribution has no components"))?;
        let counts: Vec<usize> = first.strategies.iter().map(MixedStrategy::len).collect();
        if counts.is_empty() {
            return Err(invalid("component with no players"));
        }
        for (k, c) in components.iter().enumerate() {
            if !c.weight.is_finite() || c.weight < 0.0 {
                return Err(invalid(format!("component {k} has weight {}", c.weight)));
            }
            let ck: Vec<usize> = c.strategies.iter().map(MixedStrategy::len).collect();
            if ck != counts {
                return Err(dim(format!(
                    "component {k} has shape {ck:?}, expected {counts:?}"
                )));
            }
        }
        let total = stable_sum(components.iter().map(|c| c.weight));
        if (total - 1.0).abs() > PROB_TOL {
            return Err(invalid(format!("component weights sum to {total}, not 1")));
        }
        Ok(JointDistribution { components })
    }

    pub fn product(strategies: Vec<MixedStrategy>) -> Result<Self> {
        JointDistribution::new(vec![ProductComponent {
            weight: 1.0,
            strategies,
        }])
    }

    pub fn point_mass(action_counts: &[usize], profile: &[usize]) -> Result<Self> {
        if action_counts.len() != profile.len() {
            return Err(dim("profile length differs from player count"));
        }
        if profile.iter().zip(action_counts).any(|(a, c)| a >= c) {
            return Err(invalid(format!("profile {profile:?} out of range")));
        }
        JointDistribution::product(
            profile
                .iter()
                .zip(action_counts)
                .map(|(&a, &c)| MixedStrategy::pure(c, a))
                .collect(),
        )
    }

    /// Equal-weight average of product strategies, `(1/T) Σ_t ⊗_i θ_i^(t)`.
    pub fn average_of_products(rounds: Vec<Vec<MixedStrategy>>) -> Result<Self> {
        let w = 1.0 / rounds.len().max(1) as f64;
        JointDistribution::new(
            rounds
                .into_iter()
                .map(|strategies| ProductComponent { weight: w, strategies })
                .collect(),
        )
    }

    /// A correlated distribution over pure profiles.
    pub fn from_weighted_profiles(
        action_counts: &[usize],
        profiles: &[(f64, Vec<usize>)],
    ) -> Result<Self> {
        let mut components = Vec::with_capacity(profiles.len());
        for (w, p) in profiles {
            if p.len() != action_counts.len() || p.iter().zip(action_counts).any(|(a, c)| a >= c) {
                return Err(invalid(format!("profile {p:?} out of range")));
            }
            components.push(ProductComponent {
                weight: *w,
                strategies: p
                    .iter()
                    .zip(action_counts)
                    .map(|(&a, &c)| MixedStrategy::pure(c, a))
                    .collect(),
            });
        }
        JointDistribution::new(components)
    }

    pub fn components(&self) -> &[ProductComponent] {
        &self.components
    }

    pub fn num_players(&self) -> usize {
        self.components[0].strategies.len()
    }

    pub fn action_counts(&self) -> Vec<usize> {
        self.components[0]
            .strategies
            .iter()
            .map(MixedStrategy::len)
            .collect()
    }

    pub fn check_shape(&self, action_counts: &[usize]) -> Result<()> {
        let mine = self.action_counts();
        if mine != action_counts {
            return Err(dim(format!(
                "distribution shape {mine:?} does not match game {action_counts:?}"
            )));
        }
        Ok(())
    }

    /// Marginal distribution of one player's action.
    pub fn marginal(&self, player: usize) -> Vec<f64> {
        let n = self.components[0].strategies[player].len();
        let mut m = vec![0.0; n];
        for c in &self.components {
            for (a, p) in c.strategies[player].probs().iter().enumerate() {
                m[a] += c.weight * p;
            }
        }
        m
    }

    pub fn prob_of_profile(&self, profile: &[usize]) -> f64 {
        self.components
            .iter()
            .map(|c| {
                c.weight
                    * c.strategies
                        .iter()
                        .zip(profile)
                        .map(|(s, &a)| s.prob(a))
                        .product::<f64>()
            })
            .sum()
    }

    /// True when no positive-weight component puts mass outside `sets`.
    pub fn supported_within(&self, sets: &[Vec<usize>]) -> bool {
        self.components.iter().filter(|c| c.weight > 0.0).all(|c| {
            c.strategies.iter().zip(sets).all(|(s, allowed)| {
                s.probs()
                    .iter()
                    .enumerate()
                    .all(|(a, &p)| p == 0.0 || allowed.contains(&a))
            })
        })
    }

    /// Support of each player's marginal.
    pub fn marginal_supports(&self) -> Vec<Vec<usize>> {
        (0..self.num_players())
            .map(|i| {
                self.marginal(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 0.0)
                    .map(|(a, _)| a)
                    .collect()
            })
            .collect()
    }

    /// Draw a full joint profile.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        ComponentSampler::new(self.components.iter().map(|c| c.weight).collect())
            .expect("validated weights")
            .draw_profile(self, rng)
    }
}

/// Inverse-CDF sampler over component indices.
#[derive(Clone, Debug)]
pub(crate) struct ComponentSampler {
    cumulative: Vec<f64>,
}

impl ComponentSampler {
    pub(crate) fn new(weights: Vec<f64>) -> Option<Self> {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        (acc > 0.0).then_some(ComponentSampler { cumulative })
    }

    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().unwrap();
        let u = rng.gen::<f64>() * total;
        let k = self.cumulative.partition_point(|&c| c <= u);
        k.min(self.cumulative.len() - 1)
    }

    pub(crate) fn draw_profile<R: Rng + ?Sized>(
        &self,
        dist: &JointDistribution,
        rng: &mut R,
    ) -> Vec<usize> {
        let c = &dist.components[self.draw(rng)];
        c.strategies.iter().map(|s| s.sample(rng)).collect()
    }
}
