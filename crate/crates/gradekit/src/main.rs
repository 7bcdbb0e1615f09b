fn main() {
    std::process::exit(gradekit::cli::run());
}
