//! Learning to label: a per-query logistic model that distributes the page
//! outcome onto the shown cards as credits.
//!
//! For one query term, the page outcome is modeled as
//! `Logistic(bias + sum over shown cards of (clicked * click_weight +
//! viewed * view_weight))`. The fitted per-card weights act as pseudo
//! labels for ranking, and the weight-times-mean products give an
//! interpretable "value" breakdown per card.
//!
//! Each query term is an independent regression; fitting many terms is an
//! embarrassingly parallel map.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labeling::{CardLabel, Strategy};
use crate::qpv::Qpv;

/// Query terms with fewer QPVs than this are still fit but marked
/// low-confidence in the model record.
pub const LOW_CONFIDENCE_QPVS: usize = 5;

/// Optimizer settings: gradient descent with Armijo backtracking and L2
/// regularization. Regularization is mandatory here because per-term data
/// is frequently linearly separable (all-positive terms), under which the
/// unregularized estimate diverges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub l2_lambda: f64,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub initial_step: f64,
    pub backtrack_factor: f64,
    pub armijo_c: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            l2_lambda: 0.01,
            max_iterations: 500,
            gradient_tolerance: 1e-8,
            initial_step: 1.0,
            backtrack_factor: 0.5,
            armijo_c: 1e-4,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(format!("ltl fit: {what}")));
        if self.l2_lambda < 0.0 {
            return bad("l2_lambda must be non-negative");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive");
        }
        if !(self.gradient_tolerance > 0.0) {
            return bad("gradient_tolerance must be positive");
        }
        if !(self.initial_step > 0.0) || !(0.0..1.0).contains(&self.backtrack_factor) {
            return bad("step schedule must be positive with backtrack factor in (0,1)");
        }
        Ok(())
    }
}

/// Fitted per-query-term credit model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtlModel {
    pub query: String,
    pub bias: f64,
    pub click_weight: BTreeMap<String, f64>,
    pub view_weight: BTreeMap<String, f64>,
    pub converged: bool,
    pub num_qpvs_fit: usize,
    pub low_confidence: bool,
}

/// Labels for one QPV plus the cards that were missing from the model
/// (treated as zero-weight).
#[derive(Debug, Clone, PartialEq)]
pub struct LtlLabeling {
    pub labels: Vec<CardLabel>,
    pub cold_cards: Vec<String>,
}

/// Value breakdown for one card: `value = weight * mean` per feature, and
/// `total = click_value + view_value`, all exact identities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardValue {
    pub card_type: String,
    pub click_value: f64,
    pub click_weight: f64,
    pub click_mean: f64,
    pub view_value: f64,
    pub view_weight: f64,
    pub view_mean: f64,
    pub total_value: f64,
}

impl CardValue {
    /// Recompute the derived fields from weights and means.
    pub fn from_weights_and_means(
        card_type: String,
        click_weight: f64,
        click_mean: f64,
        view_weight: f64,
        view_mean: f64,
    ) -> Self {
        let click_value = click_weight * click_mean;
        let view_value = view_weight * view_mean;
        CardValue {
            card_type,
            click_value,
            click_weight,
            click_mean,
            view_value,
            view_weight,
            view_mean,
            total_value: click_value + view_value,
        }
    }
}

/// Per-card value report for one query, sorted by total value descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardValueReport {
    pub query: String,
    pub cards: Vec<CardValue>,
}

/// The regularized logistic objective for one query term.
///
/// Parameter layout: `[bias, click_0, view_0, click_1, view_1, ...]` with
/// cards in lexicographic order (see [`LtlProblem::cards`]). Exposed so the
/// gradient can be verified against finite differences of [`objective`]
/// from the outside.
///
/// [`objective`]: LtlProblem::objective
pub struct LtlProblem {
    query: String,
    cards: Vec<String>,
    lambda: f64,
    /// Per QPV: outcome and (card index, clicked, viewed) for shown cards.
    rows: Vec<(f64, Vec<(usize, bool, bool)>)>,
}

fn stable_softplus(a: f64) -> f64 {
    // ln(1 + e^a) without overflow.
    a.max(0.0) + (-a.abs()).exp().ln_1p()
}

fn stable_sigmoid(a: f64) -> f64 {
    if a >= 0.0 {
        1.0 / (1.0 + (-a).exp())
    } else {
        let e = a.exp();
        e / (1.0 + e)
    }
}

impl LtlProblem {
    /// Build the problem for QPVs that all share one query term.
    pub fn new(qpvs: &[Qpv], lambda: f64) -> Result<Self> {
        let first = qpvs
            .first()
            .ok_or(Error::EmptyInput("cannot fit a model on zero QPVs"))?;
        let query = first.query.clone();
        for qpv in qpvs {
            if qpv.query != query {
                return Err(Error::QueryMismatch {
                    expected: query,
                    found: qpv.query.clone(),
                });
            }
        }
        let card_set: std::collections::BTreeSet<&str> = qpvs
            .iter()
            .flat_map(|q| q.cards.iter().map(|c| c.card_type.as_str()))
            .collect();
        let cards: Vec<String> = card_set.into_iter().map(str::to_string).collect();
        let index: BTreeMap<&str, usize> = cards
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        let rows = qpvs
            .iter()
            .map(|qpv| {
                let features = qpv
                    .cards
                    .iter()
                    .map(|c| (index[c.card_type.as_str()], c.clicked, c.viewed))
                    .collect();
                (qpv.outcome(), features)
            })
            .collect();
        Ok(LtlProblem {
            query,
            cards,
            lambda,
            rows,
        })
    }

    pub fn query(&self) -> &str {
        &self.query
    }

    /// Cards in parameter order.
    pub fn cards(&self) -> &[String] {
        &self.cards
    }

    pub fn num_params(&self) -> usize {
        1 + 2 * self.cards.len()
    }

    fn margin(&self, theta: &[f64], features: &[(usize, bool, bool)]) -> f64 {
        let mut z = theta[0];
        for &(card, clicked, viewed) in features {
            if clicked {
                z += theta[1 + 2 * card];
            }
            if viewed {
                z += theta[2 + 2 * card];
            }
        }
        z
    }

    /// Regularized negative log-likelihood.
    pub fn objective(&self, theta: &[f64]) -> f64 {
        assert_eq!(theta.len(), self.num_params());
        let mut loss = 0.0;
        for (outcome, features) in &self.rows {
            loss += stable_softplus(-outcome * self.margin(theta, features));
        }
        loss + self.lambda * theta.iter().map(|t| t * t).sum::<f64>()
    }

    /// Analytic gradient of [`objective`](Self::objective).
    pub fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        assert_eq!(theta.len(), self.num_params());
        let mut grad = vec![0.0; theta.len()];
        for (outcome, features) in &self.rows {
            let s = stable_sigmoid(-outcome * self.margin(theta, features));
            let coeff = -outcome * s;
            grad[0] += coeff;
            for &(card, clicked, viewed) in features {
                if clicked {
                    grad[1 + 2 * card] += coeff;
                }
                if viewed {
                    grad[2 + 2 * card] += coeff;
                }
            }
        }
        for (g, t) in grad.iter_mut().zip(theta) {
            *g += 2.0 * self.lambda * t;
        }
        grad
    }

    /// Package a parameter vector as a model record.
    pub fn model(&self, theta: &[f64], converged: bool) -> LtlModel {
        LtlModel {
            query: self.query.clone(),
            bias: theta[0],
            click_weight: self
                .cards
                .iter()
                .enumerate()
                .map(|(i, c)| (c.clone(), theta[1 + 2 * i]))
                .collect(),
            view_weight: self
                .cards
                .iter()
                .enumerate()
                .map(|(i, c)| (c.clone(), theta[2 + 2 * i]))
                .collect(),
            converged,
            num_qpvs_fit: self.rows.len(),
            low_confidence: self.rows.len() < LOW_CONFIDENCE_QPVS,
        }
    }
}

fn minimize(problem: &LtlProblem, config: &FitConfig, trace: Option<&mut Vec<f64>>) -> (Vec<f64>, bool) {
    let mut theta = vec![0.0; problem.num_params()];
    let mut value = problem.objective(&theta);
    let mut converged = false;
    let mut history = trace;
    if let Some(h) = history.as_deref_mut() {
        h.push(value);
    }
    for _ in 0..config.max_iterations {
        let grad = problem.gradient(&theta);
        let grad_max = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if grad_max < config.gradient_tolerance {
            converged = true;
            break;
        }
        let grad_sq: f64 = grad.iter().map(|g| g * g).sum();
        let mut step = config.initial_step;
        let mut accepted = false;
        while step > 1e-20 {
            let candidate: Vec<f64> = theta
                .iter()
                .zip(&grad)
                .map(|(t, g)| t - step * g)
                .collect();
            let candidate_value = problem.objective(&candidate);
            if candidate_value <= value - config.armijo_c * step * grad_sq {
                theta = candidate;
                value = candidate_value;
                accepted = true;
                break;
            }
            step *= config.backtrack_factor;
        }
        if let Some(h) = history.as_deref_mut() {
            h.push(value);
        }
        if !accepted {
            // No descent step exists at representable step sizes.
            break;
        }
    }
    (theta, converged)
}

/// Fit the credit model for QPVs sharing one query term.
pub fn fit_ltl(qpvs: &[Qpv], config: &FitConfig) -> Result<LtlModel> {
    config.validate()?;
    let problem = LtlProblem::new(qpvs, config.l2_lambda)?;
    let (theta, converged) = minimize(&problem, config, None);
    Ok(problem.model(&theta, converged))
}

/// Like [`fit_ltl`] but also returns the objective value after every
/// accepted step (the first entry is the objective at the origin).
pub fn fit_ltl_with_trace(qpvs: &[Qpv], config: &FitConfig) -> Result<(LtlModel, Vec<f64>)> {
    config.validate()?;
    let problem = LtlProblem::new(qpvs, config.l2_lambda)?;
    let mut trace = Vec::new();
    let (theta, converged) = minimize(&problem, config, Some(&mut trace));
    Ok((problem.model(&theta, converged), trace))
}

/// Fit one model per distinct query term, in parallel. Models are returned
/// in query order; within a term, QPVs are fit in qpv_id order so the result
/// is independent of input ordering.
pub fn fit_ltl_per_query(qpvs: &[Qpv], config: &FitConfig) -> Result<Vec<LtlModel>> {
    config.validate()?;
    let mut groups: BTreeMap<&str, Vec<Qpv>> = BTreeMap::new();
    for qpv in qpvs {
        groups.entry(&qpv.query).or_default().push(qpv.clone());
    }
    let mut groups: Vec<Vec<Qpv>> = groups.into_values().collect();
    for group in &mut groups {
        group.sort_by(|a, b| a.qpv_id.cmp(&b.qpv_id));
    }
    groups
        .par_iter()
        .map(|group| fit_ltl(group, config))
        .collect()
}

impl LtlModel {
    /// Credit labels for one QPV of this model's query: per card,
    /// `viewed * view_weight + clicked * click_weight`. Cards absent from
    /// the model get zero weights and are reported as cold.
    pub fn qpv_labels(&self, qpv: &Qpv) -> Result<LtlLabeling> {
        if qpv.query != self.query {
            return Err(Error::QueryMismatch {
                expected: self.query.clone(),
                found: qpv.query.clone(),
            });
        }
        let mut labels = Vec::new();
        let mut cold_cards = Vec::new();
        for card in qpv.ranked_cards() {
            let known = self.click_weight.contains_key(&card.card_type);
            if !known {
                cold_cards.push(card.card_type.clone());
            }
            let click_w = self.click_weight.get(&card.card_type).copied().unwrap_or(0.0);
            let view_w = self.view_weight.get(&card.card_type).copied().unwrap_or(0.0);
            let mut label = 0.0;
            if card.viewed {
                label += view_w;
            }
            if card.clicked {
                label += click_w;
            }
            labels.push(CardLabel {
                qpv_id: qpv.qpv_id.clone(),
                query: qpv.query.clone(),
                card_type: card.card_type.clone(),
                label,
                strategy: Strategy::Ltl,
            });
        }
        Ok(LtlLabeling { labels, cold_cards })
    }

    /// Expected card values over the QPVs of this model's query term.
    ///
    /// Means are empirical means of the click/view indicators over all
    /// supplied QPVs (a card not shown on a page contributes zeros).
    pub fn card_values(&self, qpvs: &[Qpv]) -> Result<CardValueReport> {
        if qpvs.is_empty() {
            return Err(Error::EmptyInput("card values need at least one QPV"));
        }
        for qpv in qpvs {
            if qpv.query != self.query {
                return Err(Error::QueryMismatch {
                    expected: self.query.clone(),
                    found: qpv.query.clone(),
                });
            }
        }
        let n = qpvs.len() as f64;
        let mut cards: Vec<CardValue> = self
            .click_weight
            .keys()
            .map(|card_type| {
                let mut clicks = 0u64;
                let mut views = 0u64;
                for qpv in qpvs {
                    if let Some(obs) = qpv.card(card_type) {
                        clicks += u64::from(obs.clicked);
                        views += u64::from(obs.viewed);
                    }
                }
                CardValue::from_weights_and_means(
                    card_type.clone(),
                    self.click_weight[card_type],
                    clicks as f64 / n,
                    self.view_weight[card_type],
                    views as f64 / n,
                )
            })
            .collect();
        cards.sort_by(|a, b| {
            b.total_value
                .partial_cmp(&a.total_value)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.card_type.cmp(&b.card_type))
        });
        Ok(CardValueReport {
            query: self.query.clone(),
            cards,
        })
    }
}

// ── Model store and value report I/O ────────────────────────────────────

/// Write models as line-delimited JSON, one query term per line.
pub fn write_ltl_models<W: Write>(models: &[LtlModel], mut writer: W) -> Result<()> {
    for model in models {
        serde_json::to_writer(&mut writer, model)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_ltl_models<R: BufRead>(reader: R) -> Result<Vec<LtlModel>> {
    let mut models = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        models.push(serde_json::from_str(&line).map_err(|e| Error::ParseLine {
            line: idx + 1,
            reason: e.to_string(),
        })?);
    }
    Ok(models)
}

/// Write value reports as a TSV with one row per (query, card).
pub fn write_value_report<W: Write>(reports: &[CardValueReport], mut writer: W) -> Result<()> {
    writeln!(
        writer,
        "query\tcard_type\tclick_value\tclick_weight\tclick_mean\tview_value\tview_weight\tview_mean\ttotal_value"
    )?;
    for report in reports {
        for card in &report.cards {
            writeln!(
                writer,
                "{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
                report.query,
                card.card_type,
                card.click_value,
                card.click_weight,
                card.click_mean,
                card.view_value,
                card.view_weight,
                card.view_mean,
                card.total_value
            )?;
        }
    }
    Ok(())
}
