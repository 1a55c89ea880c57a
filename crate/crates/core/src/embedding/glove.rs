//! Weighted least-squares embedding of log co-occurrence counts.
//!
//! The objective over all stored entries is
//! `J = sum f(X_ij) (w_i . c_j + b_i + b~_j - ln X_ij)^2`
//! with `f(x) = (x / x_max)^alpha` below `x_max` and 1 above. It is minimized
//! with AdaGrad over the entries in a seeded shuffled order.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cooccur::{CooccurrenceMatrix, Vocabulary};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weighting {
    pub x_max: f64,
    pub alpha: f64,
}

impl Default for Weighting {
    fn default() -> Self {
        Weighting {
            x_max: 100.0,
            alpha: 0.75,
        }
    }
}

impl Weighting {
    pub fn weight(&self, x: f64) -> f64 {
        if x < self.x_max {
            (x / self.x_max).powf(self.alpha)
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GloveParams {
    pub dim: usize,
    pub epochs: usize,
    pub weighting: Weighting,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for GloveParams {
    fn default() -> Self {
        GloveParams {
            dim: 32,
            epochs: 100,
            weighting: Weighting::default(),
            learning_rate: 0.05,
            seed: 1,
        }
    }
}

/// Trained token vectors. Row `i` of `main`/`context` belongs to vocabulary id `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub vocab: Vocabulary,
    pub dim: usize,
    pub weighting: Weighting,
    pub main: Vec<f64>,
    pub context: Vec<f64>,
    pub bias_main: Vec<f64>,
    pub bias_context: Vec<f64>,
    /// Objective value after the last epoch.
    pub final_loss: f64,
    /// Mean per-entry loss accumulated during each epoch.
    pub epoch_losses: Vec<f64>,
}

/// Gradient of the objective, same layout as the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelGradient {
    pub main: Vec<f64>,
    pub context: Vec<f64>,
    pub bias_main: Vec<f64>,
    pub bias_context: Vec<f64>,
}

impl EmbeddingModel {
    /// Untrained parameters drawn uniformly from `[-0.5/dim, 0.5/dim]`.
    pub fn initialize(vocab: Vocabulary, dim: usize, weighting: Weighting, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::initialize_with(vocab, dim, weighting, &mut rng)
    }

    fn initialize_with(vocab: Vocabulary, dim: usize, weighting: Weighting, rng: &mut ChaCha8Rng) -> Self {
        let n = vocab.len();
        let mut draw = |len: usize| -> Vec<f64> {
            (0..len).map(|_| (rng.gen::<f64>() - 0.5) / dim as f64).collect()
        };
        let main = draw(n * dim);
        let context = draw(n * dim);
        let bias_main = draw(n);
        let bias_context = draw(n);
        EmbeddingModel {
            vocab,
            dim,
            weighting,
            main,
            context,
            bias_main,
            bias_context,
            final_loss: f64::NAN,
            epoch_losses: Vec::new(),
        }
    }

    pub fn main_row(&self, id: u32) -> &[f64] {
        let i = id as usize * self.dim;
        &self.main[i..i + self.dim]
    }

    pub fn context_row(&self, id: u32) -> &[f64] {
        let i = id as usize * self.dim;
        &self.context[i..i + self.dim]
    }

    /// Final embedding of a token: main plus context vector.
    pub fn token_vector(&self, token: &str) -> Result<Vec<f64>> {
        let id = self
            .vocab
            .id(token)
            .ok_or_else(|| Error::UnknownToken(token.to_string()))?;
        Ok(self
            .main_row(id)
            .iter()
            .zip(self.context_row(id))
            .map(|(a, b)| a + b)
            .collect())
    }

    fn residual(&self, row: u32, col: u32, x: f64) -> f64 {
        let dot: f64 = self
            .main_row(row)
            .iter()
            .zip(self.context_row(col))
            .map(|(a, b)| a * b)
            .sum();
        dot + self.bias_main[row as usize] + self.bias_context[col as usize] - x.ln()
    }

    fn check_shape(&self, x: &CooccurrenceMatrix) -> Result<()> {
        if x.size() > self.vocab.len() {
            return Err(Error::Domain(format!(
                "matrix of size {} does not fit a vocabulary of {}",
                x.size(),
                self.vocab.len()
            )));
        }
        if let Some(e) = x.entries().iter().find(|e| !(e.value > 0.0)) {
            return Err(Error::Domain(format!("X[{}][{}] = {} has no logarithm", e.row, e.col, e.value)));
        }
        Ok(())
    }

    /// Writes a plain-text table: a header comment, then one line per token
    /// holding the token and `2*dim + 2` reals (main, context, both biases).
    pub fn to_text(&self, corpus_version: u64) -> String {
        let mut out = format!(
            "# labelmine-embedding dim={} x_max={} alpha={} corpus_version={} final_loss={}\n",
            self.dim, self.weighting.x_max, self.weighting.alpha, corpus_version, self.final_loss
        );
        for (id, tok) in self.vocab.tokens().iter().enumerate() {
            out.push_str(tok);
            let id = id as u32;
            for v in self.main_row(id).iter().chain(self.context_row(id)) {
                let _ = write!(out, " {v}");
            }
            let _ = writeln!(out, " {} {}", self.bias_main[id as usize], self.bias_context[id as usize]);
        }
        out
    }

    /// Parses [`EmbeddingModel::to_text`] output; returns the model and the
    /// corpus version recorded in the header.
    pub fn from_text(text: &str) -> Result<(EmbeddingModel, u64)> {
        let bad = |m: String| Error::Schema { line: None, message: m };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty model file".into()))?;
        let mut fields = std::collections::HashMap::new();
        for kv in header.trim_start_matches('#').split_whitespace().skip(1) {
            if let Some((k, v)) = kv.split_once('=') {
                fields.insert(k, v);
            }
        }
        let get = |k: &str| -> Result<&str> {
            fields.get(k).copied().ok_or_else(|| bad(format!("model header lacks {k}")))
        };
        let num = |k: &str| -> Result<f64> { get(k)?.parse().map_err(|_| bad(format!("bad {k}"))) };
        let dim: usize = get("dim")?.parse().map_err(|_| bad("bad dim".into()))?;
        let corpus_version: u64 = get("corpus_version")?
            .parse()
            .map_err(|_| bad("bad corpus_version".into()))?;
        let weighting = Weighting {
            x_max: num("x_max")?,
            alpha: num("alpha")?,
        };
        let final_loss = num("final_loss")?;

        let mut tokens = Vec::new();
        let (mut main, mut context, mut bias_main, mut bias_context) = (vec![], vec![], vec![], vec![]);
        for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let mut parts = line.split_whitespace();
            let tok = parts.next().unwrap_or_default().to_string();
            let vals: Vec<f64> = parts
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| bad(format!("model line {}: bad number", n + 2)))?;
            if vals.len() != 2 * dim + 2 {
                return Err(bad(format!(
                    "model line {}: expected {} values, found {}",
                    n + 2,
                    2 * dim + 2,
                    vals.len()
                )));
            }
            main.extend_from_slice(&vals[..dim]);
            context.extend_from_slice(&vals[dim..2 * dim]);
            bias_main.push(vals[2 * dim]);
            bias_context.push(vals[2 * dim + 1]);
            tokens.push(tok);
        }
        let vocab = Vocabulary::from_tokens(tokens.iter().cloned());
        if vocab.tokens() != tokens.as_slice() {
            return Err(bad("model tokens must be unique and sorted".into()));
        }
        Ok((
            EmbeddingModel {
                vocab,
                dim,
                weighting,
                main,
                context,
                bias_main,
                bias_context,
                final_loss,
                epoch_losses: Vec::new(),
            },
            corpus_version,
        ))
    }

    pub fn save(&self, path: &Path, corpus_version: u64) -> Result<()> {
        crate::corpus::write_atomic(path, self.to_text(corpus_version).as_bytes())
    }

    pub fn load(path: &Path) -> Result<(EmbeddingModel, u64)> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

pub fn token_vector(model: &EmbeddingModel, token: &str) -> Result<Vec<f64>> {
    model.token_vector(token)
}

pub fn glove_loss(model: &EmbeddingModel, x: &CooccurrenceMatrix) -> Result<f64> {
    model.check_shape(x)?;
    Ok(x
        .entries()
        .iter()
        .map(|e| {
            let r = model.residual(e.row, e.col, e.value);
            model.weighting.weight(e.value) * r * r
        })
        .sum())
}

/// Exact gradient of [`glove_loss`] with respect to every parameter.
pub fn glove_gradient(model: &EmbeddingModel, x: &CooccurrenceMatrix) -> Result<ModelGradient> {
    model.check_shape(x)?;
    let d = model.dim;
    let mut g = ModelGradient {
        main: vec![0.0; model.main.len()],
        context: vec![0.0; model.context.len()],
        bias_main: vec![0.0; model.bias_main.len()],
        bias_context: vec![0.0; model.bias_context.len()],
    };
    for e in x.entries() {
        let (i, j) = (e.row as usize, e.col as usize);
        let coef = 2.0 * model.weighting.weight(e.value) * model.residual(e.row, e.col, e.value);
        for k in 0..d {
            g.main[i * d + k] += coef * model.context[j * d + k];
            g.context[j * d + k] += coef * model.main[i * d + k];
        }
        g.bias_main[i] += coef;
        g.bias_context[j] += coef;
    }
    Ok(g)
}

/// Trains embeddings for `vocab` from `x`. Single-threaded and fully
/// determined by `params.seed`.
pub fn train_glove(vocab: &Vocabulary, x: &CooccurrenceMatrix, params: &GloveParams) -> Result<EmbeddingModel> {
    if x.is_empty() {
        return Err(Error::NothingToTrain);
    }
    if params.dim == 0 || params.epochs == 0 {
        return Err(Error::Config("dim and epochs must be at least 1".into()));
    }
    if !(params.learning_rate > 0.0) {
        return Err(Error::Config("learning rate must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut model = EmbeddingModel::initialize_with(vocab.clone(), params.dim, params.weighting, &mut rng);
    model.check_shape(x)?;

    let d = params.dim;
    let lr = params.learning_rate;
    // AdaGrad accumulators start at 1 so the first step is bounded by lr.
    let mut sq_main = vec![1.0f64; model.main.len()];
    let mut sq_context = vec![1.0f64; model.context.len()];
    let mut sq_bias_main = vec![1.0f64; model.bias_main.len()];
    let mut sq_bias_context = vec![1.0f64; model.bias_context.len()];

    let entries = x.entries();
    let mut order: Vec<usize> = (0..entries.len()).collect();
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        let mut cost = 0.0;
        for &n in &order {
            let e = entries[n];
            let (i, j) = (e.row as usize, e.col as usize);
            let r = model.residual(e.row, e.col, e.value);
            let fw = params.weighting.weight(e.value);
            cost += fw * r * r;
            let coef = 2.0 * fw * r;
            if !coef.is_finite() {
                return Err(Error::Invariant(format!("training diverged at entry ({i}, {j})")));
            }
            for k in 0..d {
                let (wi, cj) = (i * d + k, j * d + k);
                let g_main = coef * model.context[cj];
                let g_ctx = coef * model.main[wi];
                model.main[wi] -= lr * g_main / sq_main[wi].sqrt();
                model.context[cj] -= lr * g_ctx / sq_context[cj].sqrt();
                sq_main[wi] += g_main * g_main;
                sq_context[cj] += g_ctx * g_ctx;
            }
            model.bias_main[i] -= lr * coef / sq_bias_main[i].sqrt();
            model.bias_context[j] -= lr * coef / sq_bias_context[j].sqrt();
            sq_bias_main[i] += coef * coef;
            sq_bias_context[j] += coef * coef;
        }
        model.epoch_losses.push(cost / entries.len() as f64);
    }
    model.final_loss = glove_loss(&model, x)?;
    Ok(model)
}
