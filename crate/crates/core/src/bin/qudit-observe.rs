use clap::Parser;
use qudit_observe::cli::{main_with, Cli};

fn main() {
    install_stderr_logger();
    std::process::exit(main_with(Cli::parse()));
}

// warnings from the library go to stderr without pulling in a logger crate
fn install_stderr_logger() {
    struct Stderr;
    impl log::Log for Stderr {
        fn enabled(&self, m: &log::Metadata) -> bool {
            m.level() <= log::Level::Warn
        }
        fn log(&self, r: &log::Record) {
            if self.enabled(r.metadata()) {
                eprintln!("{}: {}", r.level(), r.args());
            }
        }
        fn flush(&self) {}
    }
    static LOGGER: Stderr = Stderr;
    let _ = log::set_logger(&LOGGER).map(|()| log::set_max_level(log::LevelFilter::Warn));
}
