use std::io::Write;

use constellation_cli::run_command;

fn main() {
    let out = run_command(std::env::args_os());
    let report = out.report.trim_end();
    // a closed pipe downstream is not an error worth reporting
    let (mut stdout, mut stderr) = (std::io::stdout().lock(), std::io::stderr().lock());
    let _ = match &out.payload {
        Some(p) => {
            let text = serde_json::to_string_pretty(p).expect("payload serializes");
            writeln!(stdout, "{text}").and_then(|_| writeln!(stderr, "{report}"))
        }
        None if out.exit_code == 2 => writeln!(stderr, "{report}"),
        None => writeln!(stdout, "{report}"),
    };
    std::process::exit(out.exit_code);
}
