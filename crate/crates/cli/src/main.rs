use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use pindex_cli::args::Cli;
use pindex_cli::error::CliError;

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                e.exit();
            }
            return fail(CliError::Usage(e.to_string().trim_end().to_string()));
        }
    };
    let writes_file = cli.command.parts().1.out.is_some();
    match pindex_cli::execute(&cli.command) {
        Ok(report) => {
            if !writes_file {
                print!("{report}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}
