fn main() {
    if let Err(e) = uaknn::cli::run_from(std::env::args_os()) {
        match &e {
            uaknn::Error::Usage(msg) if msg.starts_with("error:") => eprintln!("{}", msg.trim_end()),
            uaknn::Error::Usage(msg) => eprintln!("error: {msg}\n\nFor more information, try '--help'."),
            other => eprintln!("error: {other}"),
        }
        std::process::exit(e.exit_code());
    }
}
