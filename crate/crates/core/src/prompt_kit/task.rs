use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ccr::CcrKind;
use super::PromptError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CsSource {
    Pew,
    Statista,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaskKind {
    Fcqa,
    Lcqa,
    Cs(CsSource),
}

impl TaskKind {
    pub const ALL: [TaskKind; 4] =
        [TaskKind::Fcqa, TaskKind::Lcqa, TaskKind::Cs(CsSource::Pew), TaskKind::Cs(CsSource::Statista)];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Fcqa => "fcqa",
            TaskKind::Lcqa => "lcqa",
            TaskKind::Cs(CsSource::Pew) => "cs-pew",
            TaskKind::Cs(CsSource::Statista) => "cs-statista",
        }
    }

    /// Few-shot prompts carry this many demonstrations unless overridden.
    pub fn default_shots(self) -> usize {
        match self {
            TaskKind::Fcqa | TaskKind::Lcqa => 6,
            TaskKind::Cs(_) => 3,
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = PromptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskKind::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| PromptError::UnknownName { what: "task", name: s.to_string() })
    }
}

impl Serialize for TaskKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for TaskKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! named_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $label:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => stringify!($variant)),+ }
            }

            /// Human-readable label.
            pub fn label(self) -> &'static str {
                match self { $($name::$variant => $label),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = PromptError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                $name::ALL
                    .iter()
                    .copied()
                    .find(|v| v.as_str() == s.trim())
                    .ok_or_else(|| PromptError::UnknownName { what: stringify!($name), name: s.to_string() })
            }
        }
    };
}

named_enum!(
    /// Factoid question categories. The first three are answered without
    /// demonstrations.
    FcqaCategory {
        VisualRetrieval => "Visual Retrieval",
        NumericalRetrieval => "Numerical Retrieval",
        CompositionalRetrieval => "Compositional Retrieval",
        ComplexRetrieval => "Complex Retrieval",
        AddSubtract => "Add & Subtraction",
        DivideMultiply => "Division & Multiplication",
        VisualReasoning => "Visual Reasoning",
        CompositionalReasoning => "Compositional Reasoning",
        Boolean => "Boolean",
    }
);

named_enum!(LcqaCategory {
    DescribeAndSummary => "Describe and Summary",
    Comparative => "Comparative",
    Discover => "Discover",
});

named_enum!(SummaryType {
    PerceptualCognitive => "Perceptual and Cognitive",
    StatisticalComparative => "Statistical and Comparative",
    VisualEncoding => "Visual Encoding",
});

impl FcqaCategory {
    pub fn needs_demonstration(self) -> bool {
        !matches!(self, Self::VisualRetrieval | Self::NumericalRetrieval | Self::CompositionalRetrieval)
    }

    /// Element kinds listed in the CCR format of this category.
    pub fn ccr_format(self) -> &'static [CcrKind] {
        use CcrKind::*;
        match self {
            Self::VisualRetrieval | Self::NumericalRetrieval | Self::CompositionalRetrieval => &[Result],
            Self::ComplexRetrieval => &[OperandVisual, OperandPlain, Reasoning, Result],
            Self::AddSubtract | Self::DivideMultiply => &[OperandPlain, Operator, Reasoning, Result],
            Self::VisualReasoning => &[OperandVisual, Operator, Reasoning, Result],
            Self::CompositionalReasoning | Self::Boolean => &[OperandVisual, OperandPlain, Operator, Reasoning, Result],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "task", content = "category", rename_all = "lowercase")]
pub enum DemoCategory {
    Fcqa(FcqaCategory),
    Lcqa(LcqaCategory),
    Cs(SummaryType),
}

impl DemoCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            DemoCategory::Fcqa(c) => c.as_str(),
            DemoCategory::Lcqa(c) => c.as_str(),
            DemoCategory::Cs(c) => c.as_str(),
        }
    }

    pub fn fcqa(self) -> Option<FcqaCategory> {
        match self {
            DemoCategory::Fcqa(c) => Some(c),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn task_names_round_trip() {
        for t in TaskKind::ALL {
            assert_eq!(t.as_str().parse::<TaskKind>().unwrap(), t);
        }
        assert!("cs".parse::<TaskKind>().is_err());
    }

    #[test]
    fn retrieval_needs_no_demo() {
        let without: Vec<_> = FcqaCategory::ALL.iter().filter(|c| !c.needs_demonstration()).collect();
        assert_eq!(without.len(), 3);
        assert_eq!(FcqaCategory::ALL.len(), 9);
    }
}
