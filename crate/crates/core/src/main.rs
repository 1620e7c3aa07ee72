use std::io::Write;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let out = popmatch::cli::run(&args);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    std::io::stdout().flush().ok();
    std::process::exit(out.exit_code);
}
