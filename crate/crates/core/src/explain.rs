//! Human-readable rules from learned clauses, and per-prediction vote
//! breakdowns.

use std::fmt;

use serde::Serialize;

use crate::clause::{Clause, EvalMode, Polarity};
use crate::document::BitDocument;
use crate::error::{Error, Result};
use crate::learner::MultiClassTm;
use crate::scalar::Scalar;
use crate::text::{binarize, TokenizerConfig, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RulePolarity {
    For,
    Against,
}

impl From<Polarity> for RulePolarity {
    fn from(p: Polarity) -> Self {
        match p {
            Polarity::Positive => RulePolarity::For,
            Polarity::Negative => RulePolarity::Against,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleTerm {
    pub term: String,
    pub negated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rule {
    pub class: String,
    pub polarity: RulePolarity,
    pub literals: Vec<RuleTerm>,
    /// Reference documents on which the clause fires at inference.
    pub support: Option<usize>,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("IF ")?;
        if self.literals.is_empty() {
            f.write_str("(empty)")?;
        }
        for (i, lit) in self.literals.iter().enumerate() {
            if i > 0 {
                f.write_str(" AND ")?;
            }
            if lit.negated {
                f.write_str("NOT ")?;
            }
            f.write_str(&lit.term)?;
        }
        let side = match self.polarity {
            RulePolarity::For => "FOR",
            RulePolarity::Against => "AGAINST",
        };
        write!(f, " THEN {side} {}", self.class)
    }
}

/// Literals appear in ascending feature order, plain before negated.
pub fn clause_to_rule(clause: &Clause, vocab: &Vocabulary, class_label: &str) -> Result<Rule> {
    if clause.n_features() != vocab.len() {
        return Err(Error::DimensionMismatch { expected: vocab.len(), found: clause.n_features() });
    }
    Ok(Rule {
        class: class_label.to_string(),
        polarity: clause.polarity().into(),
        literals: clause
            .included_literals()
            .into_iter()
            .map(|l| RuleTerm { term: vocab.term(l.feature).to_string(), negated: l.negated })
            .collect(),
        support: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleFormat {
    Text,
    Json,
}

/// Rules per class, in class order. With `top_n`, each class keeps its
/// `top_n` rules by descending support (clause order without a reference
/// corpus).
pub fn collect_rules<F: Scalar>(
    model: &MultiClassTm<F>,
    vocab: &Vocabulary,
    reference: Option<&[BitDocument]>,
    top_n: Option<usize>,
) -> Result<Vec<Rule>> {
    if let Some(d) = reference.and_then(|docs| docs.iter().find(|d| d.len() != vocab.len())) {
        return Err(Error::DimensionMismatch { expected: vocab.len(), found: d.len() });
    }
    let mut out = Vec::new();
    for (machine, label) in model.machines().iter().zip(model.class_labels()) {
        let mut rules = machine
            .clauses()
            .iter()
            .map(|c| {
                let mut rule = clause_to_rule(c, vocab, label)?;
                rule.support = reference
                    .map(|docs| docs.iter().filter(|d| c.evaluate_unchecked(d, EvalMode::Inference)).count());
                Ok(rule)
            })
            .collect::<Result<Vec<_>>>()?;
        if reference.is_some() {
            rules.sort_by_key(|r| std::cmp::Reverse(r.support));
        }
        if let Some(n) = top_n {
            rules.truncate(n);
        }
        out.extend(rules);
    }
    Ok(out)
}

pub fn export_rules<F: Scalar>(
    model: &MultiClassTm<F>,
    vocab: &Vocabulary,
    reference: Option<&[BitDocument]>,
    format: RuleFormat,
    top_n: Option<usize>,
) -> Result<String> {
    let rules = collect_rules(model, vocab, reference, top_n)?;
    Ok(match format {
        RuleFormat::Json => serde_json::to_string_pretty(&rules).expect("rules serialize"),
        RuleFormat::Text => render_text(&rules),
    })
}

fn render_text(rules: &[Rule]) -> String {
    let mut out = String::from("# rule\tsupport\n");
    for rule in rules {
        let support = rule.support.map(|s| s.to_string()).unwrap_or_else(|| "-".into());
        out.push_str(&format!("{rule}\t{support}\n"));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiredClause {
    pub clause_index: usize,
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassBreakdown {
    pub class: String,
    /// Firing clauses voting for the class minus those voting against.
    pub vote_sum: i32,
    pub fired: Vec<FiredClause>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Explanation {
    pub predicted: usize,
    pub predicted_label: String,
    pub classes: Vec<ClassBreakdown>,
}

/// Lists every clause that fires on `doc`, per class.
pub fn explain_document<F: Scalar>(
    model: &MultiClassTm<F>,
    vocab: &Vocabulary,
    doc: &BitDocument,
) -> Result<Explanation> {
    if doc.len() != vocab.len() || vocab.len() != model.n_features() {
        return Err(Error::DimensionMismatch { expected: model.n_features(), found: doc.len() });
    }
    let mut classes = Vec::with_capacity(model.n_classes());
    for (machine, label) in model.machines().iter().zip(model.class_labels()) {
        let mut fired = Vec::new();
        let mut vote_sum = 0;
        for (i, clause) in machine.clauses().iter().enumerate() {
            if clause.evaluate_unchecked(doc, EvalMode::Inference) {
                vote_sum += clause.polarity().sign();
                fired.push(FiredClause { clause_index: i, rule: clause_to_rule(clause, vocab, label)? });
            }
        }
        classes.push(ClassBreakdown { class: label.clone(), vote_sum, fired });
    }
    let sums: Vec<i32> = classes.iter().map(|c| c.vote_sum).collect();
    let predicted = crate::learner::argmax_lowest(&sums);
    Ok(Explanation { predicted, predicted_label: model.class_labels()[predicted].clone(), classes })
}

pub fn explain_prediction<F: Scalar>(
    model: &MultiClassTm<F>,
    vocab: &Vocabulary,
    text: &str,
    cfg: &TokenizerConfig,
) -> Result<Explanation> {
    explain_document(model, vocab, &binarize(text, vocab, cfg))
}

impl fmt::Display for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "predicted: {}", self.predicted_label)?;
        for c in &self.classes {
            writeln!(f, "class {} vote sum {}", c.class, c.vote_sum)?;
            for fc in &c.fired {
                writeln!(f, "  #{:<5} {}", fc.clause_index, fc.rule)?;
            }
        }
        Ok(())
    }
}
