//! Pattern posterior by brute-force enumeration of the feature sequence.
//!
//! Generative chain: a pattern `c` is drawn from the prior; at every step a
//! feature is drawn from `p(f | c) ∝ fp(f) p(c | f)` and a symbol from
//! `p(z | f)`.

/// `pcf[f][c]`: pattern given feature; `pzf[f][z]`: symbol given feature.
pub fn pattern_posterior(prior: &[f64], pcf: &[Vec<f64>], pzf: &[Vec<f64>], fp: &[f64], symbols: &[usize]) -> Vec<f64> {
    let patterns = prior.len();
    let features = fp.len();
    let steps = symbols.len();
    let mut post = vec![0.0; patterns];
    for (c, slot) in post.iter_mut().enumerate() {
        let norm: f64 = (0..features).map(|f| fp[f] * pcf[f][c]).sum();
        let mut seq = vec![0usize; steps];
        loop {
            let mut w = prior[c];
            for (k, &f) in seq.iter().enumerate() {
                w *= fp[f] * pcf[f][c] / norm * pzf[f][symbols[k]];
            }
            *slot += w;
            // odometer over feature sequences
            let mut i = 0;
            while i < steps {
                seq[i] += 1;
                if seq[i] < features {
                    break;
                }
                seq[i] = 0;
                i += 1;
            }
            if i == steps {
                break;
            }
        }
    }
    let total: f64 = post.iter().sum();
    post.iter().map(|p| p / total).collect()
}
