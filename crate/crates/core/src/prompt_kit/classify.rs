//! Keyword heuristic assigning factoid questions to a category. Used for
//! per-category reporting only.

use std::collections::BTreeMap;

use once_cell::sync::Lazy;
use regex::{Regex, RegexBuilder};
use serde::Deserialize;

use super::task::FcqaCategory;
use super::PromptError;

const BUNDLED_RULES: &str = include_str!("../../resources/fcqa_rules.toml");
pub const RULES_FORMAT_VERSION: u32 = 1;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RulesFile {
    version: u32,
    default: String,
    cues: BTreeMap<String, String>,
    rule: Vec<RuleRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleRecord {
    category: String,
    all: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct QuestionClassifier {
    rules: Vec<(FcqaCategory, Vec<Regex>)>,
    default: FcqaCategory,
}

static BUNDLED: Lazy<QuestionClassifier> =
    Lazy::new(|| QuestionClassifier::parse(BUNDLED_RULES).expect("bundled classifier rules"));

impl QuestionClassifier {
    pub fn bundled() -> &'static QuestionClassifier {
        &BUNDLED
    }

    pub fn parse(text: &str) -> Result<Self, PromptError> {
        let file: RulesFile = toml::from_str(text).map_err(|e| PromptError::Resource(e.to_string()))?;
        if file.version != RULES_FORMAT_VERSION {
            return Err(PromptError::Resource(format!("unsupported rules version {}", file.version)));
        }
        let mut cues = BTreeMap::new();
        for (name, pattern) in &file.cues {
            let re = RegexBuilder::new(pattern)
                .case_insensitive(true)
                .build()
                .map_err(|e| PromptError::Resource(format!("cue {name}: {e}")))?;
            cues.insert(name.as_str(), re);
        }
        let mut rules = Vec::with_capacity(file.rule.len());
        for r in &file.rule {
            if r.all.is_empty() {
                return Err(PromptError::Resource(format!("rule for {} has no cues", r.category)));
            }
            let res = r
                .all
                .iter()
                .map(|c| {
                    cues.get(c.as_str()).cloned().ok_or_else(|| PromptError::Resource(format!("unknown cue {c:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            rules.push((r.category.parse()?, res));
        }
        Ok(QuestionClassifier { rules, default: file.default.parse()? })
    }

    pub fn classify(&self, question: &str) -> FcqaCategory {
        self.rules
            .iter()
            .find(|(_, cues)| cues.iter().all(|re| re.is_match(question)))
            .map_or(self.default, |(c, _)| *c)
    }
}

pub fn classify_fcqa_question(question: &str) -> FcqaCategory {
    QuestionClassifier::bundled().classify(question)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prompt_kit::registry::builtin_demonstrations;
    use crate::prompt_kit::task::TaskKind;

    #[test]
    fn examples() {
        use FcqaCategory::*;
        assert_eq!(classify_fcqa_question("Is the average value of A and B more than C?"), Boolean);
        assert_eq!(classify_fcqa_question("What's the ratio of X and Y?"), DivideMultiply);
        assert_eq!(classify_fcqa_question("What is the value of Z?"), NumericalRetrieval);
        assert_eq!(classify_fcqa_question("What is the value of the leftmost bar?"), VisualRetrieval);
        assert_eq!(classify_fcqa_question("Which year has the highest value?"), CompositionalRetrieval);
    }

    #[test]
    fn builtin_questions_match_their_labels() {
        for d in builtin_demonstrations(TaskKind::Fcqa) {
            assert_eq!(Some(classify_fcqa_question(&d.input_block)), d.category.fcqa(), "{}", d.input_block);
        }
    }

    #[test]
    fn rule_file_errors() {
        assert!(QuestionClassifier::parse("version = 2\ndefault = \"Boolean\"\ncues = {}\nrule = []").is_err());
        let unknown_cue = "version = 1\ndefault = \"Boolean\"\n[cues]\n[[rule]]\ncategory = \"Boolean\"\nall = [\"x\"]";
        assert!(QuestionClassifier::parse(unknown_cue).is_err());
        let custom = "version = 1\ndefault = \"Boolean\"\n[cues]\nq = 'why'\n[[rule]]\ncategory = \"AddSubtract\"\nall = [\"q\"]";
        let c = QuestionClassifier::parse(custom).unwrap();
        assert_eq!(c.classify("WHY?"), FcqaCategory::AddSubtract);
        assert_eq!(c.classify("what"), FcqaCategory::Boolean);
    }
}
