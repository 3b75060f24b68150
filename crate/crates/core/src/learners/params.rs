//! Parameter schedules. All logarithms are natural.

fn ceil_u64(x: f64) -> u64 {
    x.ceil().max(1.0) as u64
}

/// Iterative best response minibatch `⌈16 ln(LNA/δ)/Δ²⌉`.
pub fn ibr_minibatch(l: usize, n: usize, a: usize, delta: f64, fail: f64) -> u64 {
    ceil_u64(16.0 * ((l * n * a) as f64 / fail).ln() / (delta * delta))
}

/// Clipping threshold `min{ε,Δ}/(8AN)`.
pub fn clip_threshold(epsilon: f64, delta: f64, a: usize, n: usize) -> f64 {
    epsilon.min(delta) / (8 * a * n) as f64
}

fn ln_sq(x: f64) -> f64 {
    let l = x.ln();
    l * l
}

/// Default Hedge CCE horizon
/// `⌈16 ln(2NA/δ)/ε² + 64 ln²(8AN/(min{ε,Δ}δ))/(εΔ)⌉`.
pub fn cce_rounds(n: usize, a: usize, epsilon: f64, delta: f64, fail: f64) -> usize {
    let na = (n * a) as f64;
    let t = 16.0 * (2.0 * na / fail).ln() / (epsilon * epsilon)
        + 64.0 * ln_sq(8.0 * na / (epsilon.min(delta) * fail)) / (epsilon * delta);
    t.ceil() as usize
}

/// Default adaptive CE horizon
/// `⌈A·16 ln(2NA/δ)/ε² + A·64 ln²(8AN/(min{ε,Δ}δ))/Δ²⌉`.
pub fn ce_rounds(n: usize, a: usize, epsilon: f64, delta: f64, fail: f64) -> usize {
    let na = (n * a) as f64;
    let af = a as f64;
    let t = af * 16.0 * (2.0 * na / fail).ln() / (epsilon * epsilon)
        + af * 64.0 * ln_sq(8.0 * na / (epsilon.min(delta) * fail)) / (delta * delta);
    t.ceil() as usize
}

/// `M_t = ⌈64 ln(ANT/δ)/(Δ² t)⌉`, for 1-based `t`.
pub fn cce_minibatch(t: usize, n: usize, a: usize, rounds: usize, delta: f64, fail: f64) -> u64 {
    ceil_u64(64.0 * ((a * n * rounds) as f64 / fail).ln() / (delta * delta * t as f64))
}

/// `η_t = max{√(ln A / t), 4 ln(1/p)/(Δ t)}`.
pub fn cce_learning_rate(t: usize, a: usize, delta: f64, p: f64) -> f64 {
    let t = t as f64;
    ((a as f64).ln() / t).sqrt().max(4.0 * (1.0 / p).ln() / (delta * t))
}

/// `M_i^(t) = ⌈max_a 64 θ(a) / (Δ² Σ_{τ≤t} θ^(τ)(a))⌉`.
pub fn ce_minibatch(theta: &[f64], cumulative: &[f64], delta: f64) -> u64 {
    let worst = theta
        .iter()
        .zip(cumulative)
        .filter(|(&th, _)| th > 0.0)
        .map(|(&th, &c)| th / c)
        .fold(0.0, f64::max);
    ceil_u64(64.0 * worst / (delta * delta))
}

/// `η^b = max{2 ln(1/p)/(Δ Σ_{τ≤t} θ^(τ)(b)), √(A ln A / t)}`.
pub fn ce_learning_rate(cumulative_b: f64, t: usize, a: usize, delta: f64, p: f64) -> f64 {
    let af = a as f64;
    (2.0 * (1.0 / p).ln() / (delta * cumulative_b)).max((af * af.ln() / t as f64).sqrt())
}

/// Enumeration minibatch `⌈256 ln(1/δ')/Δ²⌉` with `δ' = δ/(|profiles|·N)`.
pub fn naive_minibatch(num_profiles: usize, n: usize, delta: f64, fail: f64) -> u64 {
    let dp = fail / (num_profiles as f64 * n as f64);
    ceil_u64(256.0 * (1.0 / dp).ln() / (delta * delta))
}

/// Reduction accuracy `ε' = min{ε,Δ}/3`.
pub fn reduction_accuracy(epsilon: f64, delta: f64) -> f64 {
    epsilon.min(delta) / 3.0
}

/// CCE reduction minibatch `⌈4 ln(2NA/δ)/ε'²⌉`.
pub fn cce_reduction_minibatch(n: usize, a: usize, fail: f64, eps_prime: f64) -> u64 {
    ceil_u64(4.0 * ((2 * n * a) as f64 / fail).ln() / (eps_prime * eps_prime))
}

/// CE reduction minibatch `⌈4 ln(2NA²/δ)/ε'²⌉`.
pub fn ce_reduction_minibatch(n: usize, a: usize, fail: f64, eps_prime: f64) -> u64 {
    ceil_u64(4.0 * ((2 * n * a * a) as f64 / fail).ln() / (eps_prime * eps_prime))
}

/// Plain Hedge horizon used by the default subgame solvers, `⌈16 ln(2NA/δ)/ε²⌉`.
pub fn plugin_rounds(n: usize, a: usize, epsilon: f64, fail: f64) -> usize {
    (16.0 * ((2 * n * a) as f64 / fail).ln() / (epsilon * epsilon)).ceil() as usize
}
