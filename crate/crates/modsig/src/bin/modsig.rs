fn main() {
    // MODSIG_THREADS caps the worker pool; it affects speed only, never
    // results, because all parallel reductions are order-fixed.
    if let Ok(value) = std::env::var("MODSIG_THREADS") {
        match value.trim().parse::<usize>() {
            Ok(threads) if threads >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
            _ => eprintln!("MODSIG_THREADS={value:?} ignored: not a positive integer"),
        }
    }
    let outcome = modsig::cli::run_command(std::env::args_os());
    std::process::exit(outcome.exit_code);
}
