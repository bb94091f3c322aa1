//! Repeated, event-stratified k-fold cross-validation of the filter, MRMR
//! and multivariable Cox model-building protocol.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::cindex::{fold_cindex, harrell_cindex};
use super::cox::cox_fit;
use super::mrmr::mrmr_select;
use super::{Outcome, SurvivalRecord};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::repro::{GroupKey, ReproKind, ReproResult};
use crate::stats::{mean, percentile};
use crate::table::{FeatureTable, Roi};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvConfig {
    pub ccc_threshold: f64,
    pub feature_count: usize,
    pub folds: usize,
    pub repetitions: usize,
    pub univariate_cindex_min: f64,
    pub univariate_p_max: f64,
    pub seed: u64,
}

impl CvConfig {
    pub const CCC_THRESHOLDS: [f64; 5] = [0.0, 0.8, 0.85, 0.9, 0.95];
    pub const FEATURE_COUNTS: [usize; 7] = [1, 2, 4, 8, 16, 32, 64];

    pub fn new(ccc_threshold: f64, feature_count: usize, seed: u64) -> Self {
        Self {
            ccc_threshold,
            feature_count,
            folds: 10,
            repetitions: 100,
            univariate_cindex_min: 0.55,
            univariate_p_max: 0.1,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.ccc_threshold) {
            return Err(Error::Argument(format!(
                "ccc_threshold {} outside [0, 1]",
                self.ccc_threshold
            )));
        }
        if self.feature_count == 0 {
            return Err(Error::Argument("feature_count must be at least 1".into()));
        }
        if self.folds < 2 || self.repetitions == 0 {
            return Err(Error::Argument(
                "need at least 2 folds and 1 repetition".into(),
            ));
        }
        Ok(())
    }
}

/// One candidate feature: (extractor, roi, feature) and its generalized CCC.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub key: GroupKey,
    pub ccc: Option<f64>,
}

/// Candidate features aligned with outcomes.
#[derive(Debug, Clone)]
pub struct CvData {
    pub candidates: Vec<Candidate>,
    /// `values[c][s]`: candidate `c` on subject `s`.
    pub values: Vec<Vec<Option<f64>>>,
    pub outcomes: Vec<Outcome>,
    pub subjects: Vec<String>,
}

impl CvData {
    pub fn new(
        candidates: Vec<Candidate>,
        values: Vec<Vec<Option<f64>>>,
        outcomes: Vec<Outcome>,
        subjects: Vec<String>,
    ) -> Result<Self> {
        if candidates.len() != values.len() {
            return Err(Error::Argument(
                "one value column per candidate required".into(),
            ));
        }
        if values.iter().any(|v| v.len() != outcomes.len()) || subjects.len() != outcomes.len() {
            return Err(Error::Argument(
                "value columns must cover every subject".into(),
            ));
        }
        if outcomes
            .iter()
            .any(|o| !(o.time > 0.0 && o.time.is_finite()))
        {
            return Err(Error::Argument("survival times must be positive".into()));
        }
        Ok(Self {
            candidates,
            values,
            outcomes,
            subjects,
        })
    }

    /// Joins a feature table (one value per subject and feature key), the
    /// generalized CCCs and the outcomes. Subjects without outcomes are
    /// ignored; `extractors` restricts the candidate pool.
    pub fn from_table(
        table: &FeatureTable,
        repro: &[ReproResult],
        outcomes: &[SurvivalRecord],
        extractors: Option<&[String]>,
    ) -> Result<Self> {
        let mut subject_index = BTreeMap::new();
        for (i, o) in outcomes.iter().enumerate() {
            if subject_index.insert(o.subject_id.as_str(), i).is_some() {
                return Err(Error::Argument(format!(
                    "duplicate outcome for subject {}",
                    o.subject_id
                )));
            }
        }
        let ccc: BTreeMap<&GroupKey, f64> = repro
            .iter()
            .filter(|r| r.kind == ReproKind::Generalized)
            .map(|r| (&r.key, r.ccc))
            .collect();
        let mut columns: BTreeMap<GroupKey, Vec<Option<f64>>> = BTreeMap::new();
        let mut seen: BTreeMap<(GroupKey, usize), ()> = BTreeMap::new();
        for r in &table.records {
            if extractors.is_some_and(|e| !e.contains(&r.extractor)) {
                continue;
            }
            let Some(&s) = subject_index.get(r.subject_id.as_str()) else {
                continue;
            };
            let key = GroupKey {
                extractor: r.extractor.clone(),
                roi: r.roi,
                feature: r.feature,
            };
            if seen.insert((key.clone(), s), ()).is_some() {
                return Err(Error::Argument(format!(
                    "subject {} has several values for {} {} {}; select one reconstruction",
                    r.subject_id,
                    key.extractor,
                    key.roi.as_str(),
                    key.feature
                )));
            }
            columns
                .entry(key)
                .or_insert_with(|| vec![None; outcomes.len()])[s] =
                r.value.filter(|v| v.is_finite());
        }
        let (keys, values): (Vec<_>, Vec<_>) = columns.into_iter().unzip();
        let candidates = keys
            .into_iter()
            .map(|key| Candidate {
                ccc: ccc.get(&key).copied(),
                key,
            })
            .collect();
        Self::new(
            candidates,
            values,
            outcomes.iter().map(SurvivalRecord::outcome).collect(),
            outcomes.iter().map(|o| o.subject_id.clone()).collect(),
        )
    }

    fn eligible(&self, c: usize, threshold: f64) -> bool {
        match self.candidates[c].ccc {
            Some(v) => v >= threshold,
            None => threshold <= 0.0,
        }
    }
}

/// Fold index per subject. Events and censored subjects are shuffled
/// separately with the (seed, repetition) stream and dealt round-robin.
pub fn fold_assignment(
    outcomes: &[Outcome],
    folds: usize,
    seed: u64,
    repetition: usize,
) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(repetition as u64);
    let mut events: Vec<usize> = (0..outcomes.len()).filter(|&i| outcomes[i].event).collect();
    let mut censored: Vec<usize> = (0..outcomes.len())
        .filter(|&i| !outcomes[i].event)
        .collect();
    events.shuffle(&mut rng);
    censored.shuffle(&mut rng);
    let mut fold = vec![0; outcomes.len()];
    for (k, &s) in events.iter().chain(&censored).enumerate() {
        fold[s] = k % folds;
    }
    fold
}

/// A candidate that passed the univariate training-fold filters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Screened {
    pub candidate: usize,
    pub folded_cindex: f64,
    pub negated: bool,
    pub p_value: f64,
    pub mean: f64,
    pub sd: f64,
}

/// Univariate filters on the training rows: no missing values, non-constant,
/// folded C-index at least the minimum and univariate Cox p below the
/// maximum. These are per-feature predicates and so commute with the CCC
/// filter, which is applied later.
pub fn screen_fold(data: &CvData, train: &[usize], config: &CvConfig) -> Vec<Screened> {
    let outcomes: Vec<Outcome> = train.iter().map(|&s| data.outcomes[s]).collect();
    let mut out = Vec::new();
    for c in 0..data.candidates.len() {
        let Some(x) = train
            .iter()
            .map(|&s| data.values[c][s])
            .collect::<Option<Vec<f64>>>()
        else {
            continue;
        };
        let m = mean(&x);
        let var = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64;
        if !(var > 0.0) || x.iter().all(|v| *v == x[0]) {
            continue;
        }
        let Ok(c_index) = harrell_cindex(&x, &outcomes) else {
            continue;
        };
        let (folded, negated) = fold_cindex(c_index);
        if folded < config.univariate_cindex_min {
            continue;
        }
        let sd = var.sqrt();
        let z = Matrix::from_rows(x.len(), 1, x.iter().map(|v| (v - m) / sd).collect());
        let Ok(model) = cox_fit(&z, &outcomes) else {
            continue;
        };
        let p = model.p_values[0];
        if !(p < config.univariate_p_max) {
            continue;
        }
        out.push(Screened {
            candidate: c,
            folded_cindex: folded,
            negated,
            p_value: p,
            mean: m,
            sd,
        });
    }
    out
}

struct FoldFit {
    selected: Vec<usize>,
    test_risk: Vec<f64>,
    train_cindex: f64,
    converged: bool,
}

fn fit_fold(
    data: &CvData,
    train: &[usize],
    test: &[usize],
    screened: &[Screened],
    config: &CvConfig,
) -> FoldFit {
    let null = |converged| FoldFit {
        selected: Vec::new(),
        test_risk: vec![0.0; test.len()],
        train_cindex: 0.5,
        converged,
    };
    let pool: Vec<&Screened> = screened
        .iter()
        .filter(|s| data.eligible(s.candidate, config.ccc_threshold))
        .collect();
    if pool.is_empty() {
        return null(true);
    }
    let z = |s: &Screened, subject: usize| {
        data.values[s.candidate][subject].map_or(0.0, |v| (v - s.mean) / s.sd)
    };
    let columns: Vec<Vec<f64>> = pool
        .iter()
        .map(|s| train.iter().map(|&r| z(s, r)).collect())
        .collect();
    let relevance: Vec<f64> = pool.iter().map(|s| s.folded_cindex - 0.5).collect();
    let ids: Vec<&GroupKey> = pool
        .iter()
        .map(|s| &data.candidates[s.candidate].key)
        .collect();
    let mut chosen: Vec<usize> = mrmr_select(&columns, &relevance, &ids, config.feature_count);

    let outcomes: Vec<Outcome> = train.iter().map(|&s| data.outcomes[s]).collect();
    loop {
        if chosen.is_empty() {
            return null(true);
        }
        let mut x = Matrix::zeros(train.len(), chosen.len());
        for (j, &p) in chosen.iter().enumerate() {
            for r in 0..train.len() {
                x.set(r, j, columns[p][r]);
            }
        }
        match cox_fit(&x, &outcomes) {
            Ok(model) => {
                let train_risk = model.risk(&x);
                let train_cindex = harrell_cindex(&train_risk, &outcomes).unwrap_or(0.5);
                let test_risk = test
                    .iter()
                    .map(|&s| {
                        chosen
                            .iter()
                            .zip(&model.coefficients)
                            .map(|(&p, b)| b * z(pool[p], s))
                            .sum()
                    })
                    .collect();
                return FoldFit {
                    selected: chosen.iter().map(|&p| pool[p].candidate).collect(),
                    test_risk,
                    train_cindex,
                    converged: model.converged,
                };
            }
            Err(Error::Collinear(cols)) => {
                let drop: Vec<usize> = cols.iter().map(|&c| chosen[c]).collect();
                chosen.retain(|p| !drop.contains(p));
            }
            Err(_) => return null(false),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepetitionResult {
    pub repetition: usize,
    /// C-index of the pooled out-of-fold risks.
    pub test_cindex: f64,
    /// Mean over folds of the training-data C-index.
    pub train_cindex: f64,
    /// Selected candidate indices per fold.
    pub selections: Vec<Vec<usize>>,
    pub null_folds: usize,
    pub unconverged_folds: usize,
    /// Mean over non-null folds of the fraction of liver features.
    pub liver_fraction: Option<f64>,
}

fn fold_sets(fold: &[usize], k: usize) -> (Vec<usize>, Vec<usize>) {
    let train = (0..fold.len()).filter(|&i| fold[i] != k).collect();
    let test = (0..fold.len()).filter(|&i| fold[i] == k).collect();
    (train, test)
}

/// One repetition for several (ccc_threshold, feature_count) cells sharing
/// the folds and the univariate screens. Other settings come from `base`.
pub fn run_repetition_grid(
    data: &CvData,
    cells: &[(f64, usize)],
    base: &CvConfig,
    repetition: usize,
) -> Result<Vec<RepetitionResult>> {
    let n = data.outcomes.len();
    if n < base.folds {
        return Err(Error::InsufficientData(format!(
            "{n} subjects for {} folds",
            base.folds
        )));
    }
    let fold = fold_assignment(&data.outcomes, base.folds, base.seed, repetition);
    let mut risks = vec![vec![0.0; n]; cells.len()];
    let mut fits: Vec<Vec<FoldFit>> = (0..cells.len()).map(|_| Vec::new()).collect();
    for k in 0..base.folds {
        let (train, test) = fold_sets(&fold, k);
        let screened = screen_fold(data, &train, base);
        for (c, &(ccc_threshold, feature_count)) in cells.iter().enumerate() {
            let config = CvConfig {
                ccc_threshold,
                feature_count,
                ..*base
            };
            let fit = fit_fold(data, &train, &test, &screened, &config);
            for (&s, &r) in test.iter().zip(&fit.test_risk) {
                risks[c][s] = r;
            }
            fits[c].push(fit);
        }
    }
    cells
        .iter()
        .enumerate()
        .map(|(c, _)| {
            let test_cindex = harrell_cindex(&risks[c], &data.outcomes)?;
            let folds = &fits[c];
            let fractions: Vec<f64> = folds
                .iter()
                .filter(|f| !f.selected.is_empty())
                .map(|f| {
                    let liver = f
                        .selected
                        .iter()
                        .filter(|&&s| data.candidates[s].key.roi == Roi::Liver)
                        .count();
                    liver as f64 / f.selected.len() as f64
                })
                .collect();
            Ok(RepetitionResult {
                repetition,
                test_cindex,
                train_cindex: folds.iter().map(|f| f.train_cindex).sum::<f64>()
                    / folds.len() as f64,
                selections: folds.iter().map(|f| f.selected.clone()).collect(),
                null_folds: folds.iter().filter(|f| f.selected.is_empty()).count(),
                unconverged_folds: folds.iter().filter(|f| !f.converged).count(),
                liver_fraction: (!fractions.is_empty()).then(|| mean(&fractions)),
            })
        })
        .collect()
}

pub fn run_repetition(
    data: &CvData,
    config: &CvConfig,
    repetition: usize,
) -> Result<RepetitionResult> {
    config.validate()?;
    let mut r = run_repetition_grid(
        data,
        &[(config.ccc_threshold, config.feature_count)],
        config,
        repetition,
    )?;
    Ok(r.remove(0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceSummary {
    pub config: CvConfig,
    pub test_cindex: Vec<f64>,
    pub train_cindex: Vec<f64>,
    pub mean_test_cindex: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_train_cindex: f64,
    pub liver_fraction: Option<f64>,
    /// (candidate index, folds selecting it) for every candidate selected at
    /// least once, by candidate index.
    pub selection_counts: Vec<(usize, usize)>,
    pub total_folds: usize,
    pub null_folds: usize,
    pub unconverged_folds: usize,
}

/// Aggregates repetitions (in repetition order) into a summary with a
/// percentile 95% interval.
pub fn summarize(config: &CvConfig, reps: &[RepetitionResult]) -> PerformanceSummary {
    let test: Vec<f64> = reps.iter().map(|r| r.test_cindex).collect();
    let train: Vec<f64> = reps.iter().map(|r| r.train_cindex).collect();
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for r in reps {
        for s in r.selections.iter().flatten() {
            *counts.entry(*s).or_default() += 1;
        }
    }
    let fractions: Vec<f64> = reps.iter().filter_map(|r| r.liver_fraction).collect();
    PerformanceSummary {
        config: *config,
        mean_test_cindex: mean(&test),
        ci_lo: percentile(&test, 2.5),
        ci_hi: percentile(&test, 97.5),
        mean_train_cindex: mean(&train),
        liver_fraction: (!fractions.is_empty()).then(|| mean(&fractions)),
        selection_counts: counts.into_iter().collect(),
        total_folds: reps.iter().map(|r| r.selections.len()).sum(),
        null_folds: reps.iter().map(|r| r.null_folds).sum(),
        unconverged_folds: reps.iter().map(|r| r.unconverged_folds).sum(),
        test_cindex: test,
        train_cindex: train,
    }
}

/// Sequential driver; see the `radrepro` crate for the parallel one.
pub fn run_cv(data: &CvData, config: &CvConfig) -> Result<PerformanceSummary> {
    config.validate()?;
    let reps = (0..config.repetitions)
        .map(|r| run_repetition(data, config, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(config, &reps))
}
