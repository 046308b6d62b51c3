use std::io::Write;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let (out, code) = ctl_forget::cli::run(std::env::args_os());
    if code == 0 {
        print!("{out}");
        let _ = std::io::stdout().flush();
    } else {
        eprint!("{out}");
    }
    std::process::exit(code);
}
