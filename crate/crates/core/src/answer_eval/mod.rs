//! Answer extraction, relaxed matching, table similarity metrics and the
//! demonstration consistency check.

mod assignment;
mod consistency;
mod extract;
mod metrics;
mod report;

pub use assignment::{canonical_sum, min_cost_assignment};
pub use consistency::{consistency_check, text_similarity, ConsistencyResult};
pub use extract::{extract_final_answer, relaxed_match, AnswerKind, ExtractedAnswer, DEFAULT_TOLERANCE};
pub use metrics::{
    entry_similarity, normalized_levenshtein, relative_distance, rms_entries, rms_f1, rnss, rnss_values, table_entries,
    Prf, TableEntry, EPSILON,
};
pub use report::{EvalRecord, MetricReport, SplitSummary};
