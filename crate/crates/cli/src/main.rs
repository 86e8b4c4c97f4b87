use clap::Parser;

fn main() {
    let cli = qfsplit_cli::Cli::parse();
    let code = qfsplit_cli::run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
