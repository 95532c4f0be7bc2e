pub mod answer_eval;
pub mod chart_data;
pub mod harness;
pub mod llm_gateway;
pub mod prompt_kit;
pub mod vdt_builder;
