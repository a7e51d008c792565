use std::io::Write;

fn main() {
    let mut stdin = std::io::stdin().lock();
    let result = valgraph_cli::run(std::env::args_os(), &mut stdin);
    let mut stdout = std::io::stdout();
    let _ = stdout.write_all(result.stdout.as_bytes());
    let _ = stdout.flush();
    let mut stderr = std::io::stderr();
    let _ = stderr.write_all(result.stderr.as_bytes());
    let _ = stderr.flush();
    std::process::exit(result.code);
}
