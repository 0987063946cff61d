use std::io;

fn main() {
    let tol = std::env::var(dktwist_cli::TOL_ENV).ok();
    let code = dktwist_cli::run(
        std::env::args_os(),
        tol.as_deref(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
