use std::process::ExitCode;

use serde::Serialize;

use peribeta_core::classify::{classify_with, ClassificationReport, PropertyF};
use peribeta_core::exec::ExecMode;
use peribeta_core::field::BetaBase;

use crate::output::{emit, SCHEMA};
use crate::CliError;

#[derive(Serialize)]
struct ClassifyOut {
    schema: &'static str,
    command: &'static str,
    #[serde(flatten)]
    report: ClassificationReport,
}

pub fn run(
    base: &BetaBase,
    search_bound: u64,
    mode: ExecMode,
    json: bool,
) -> Result<ExitCode, CliError> {
    let report = classify_with(base, search_bound, mode)?;
    let out = ClassifyOut {
        schema: SCHEMA,
        command: "classify",
        report,
    };
    emit(json, &out, || human(&out.report));
    Ok(ExitCode::SUCCESS)
}

fn human(r: &ClassificationReport) {
    println!("base: {}  (degree {})", r.base, r.degree);
    println!("pisot: {}   unit: {}", r.is_pisot, r.is_unit);
    println!("conjugates: {:?}", r.conjugates);
    let f = match &r.property_f {
        PropertyF::Holds => "holds".to_string(),
        PropertyF::Fails => "fails".to_string(),
        PropertyF::Undetermined { bound } => format!("undetermined (searched {bound} states)"),
    };
    println!("property_F: {f}");
    println!("family: {:?}", r.family);
    if let Some(d) = &r.family_discrepancy {
        println!("discrepancy: {d}");
    }
    if let Some(g) = &r.gamma_known {
        println!("gamma: {g:?}");
    }
    if let Some(w) = &r.witness {
        println!("witness: {} with expansion {}", w.coords.join(", "), w.expansion);
    }
    println!("search states: {}", r.search_states);
}
