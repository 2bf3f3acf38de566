fn main() {
    // Unlocked handles: bootstrap progress is reported from worker threads.
    let code = mlm_core::cli::run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
