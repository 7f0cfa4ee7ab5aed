use std::path::Path;

use realgap_core::bss::{compile_relu_net, parse_program, run, BssError, DEFAULT_MAX_STEPS};
use realgap_core::neural::NeuralNet;

use crate::error::CliError;
use crate::io::{emit, parse_rational_list, read_input, show};

fn bss_error(e: BssError) -> CliError {
    match e {
        BssError::Malformed(_) | BssError::InputArity { .. } => CliError::Usage(e.into()),
        BssError::DivisionByZero { .. } | BssError::StepLimit { .. } => CliError::Failure(e.into()),
    }
}

pub fn cmd_run(program: &Path, input: &str, trace: Option<&Path>, max_steps: Option<u64>) -> Result<bool, CliError> {
    let prog = parse_program(&read_input(program)?).map_err(bss_error)?;
    let x = parse_rational_list("--input", input)?;
    let outcome = run(&prog, &x, max_steps.unwrap_or(DEFAULT_MAX_STEPS)).map_err(bss_error)?;
    if let Some(path) = trace {
        let text = serde_json::to_string_pretty(&outcome).expect("run outcome serializes");
        emit(Some(path), &text)?;
    }
    println!("{}", outcome.outputs.iter().map(show).collect::<Vec<_>>().join(","));
    Ok(true)
}

pub fn cmd_compile_net(net: &Path, output: Option<&Path>) -> Result<bool, CliError> {
    let net: NeuralNet = serde_json::from_str(&read_input(net)?)
        .map_err(|e| CliError::usage(format!("network {}: {e}", net.display())))?;
    let prog = compile_relu_net(&net).map_err(bss_error)?;
    emit(output, &prog.to_json())?;
    Ok(true)
}
