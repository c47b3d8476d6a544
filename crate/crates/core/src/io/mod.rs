//! Canonical file formats: indicator CSV, tensor JSON, scenario TOML.

mod indicator_csv;
mod scenario;
mod tensor_json;

pub use indicator_csv::{format_sig9, indicator_csv_row, write_indicator_csv, INDICATOR_CSV_HEADER};
pub use scenario::{read_scenario, read_scenario_json, scenario_to_json, write_scenario};
pub use tensor_json::{read_tensor_json, write_tensor_json};
