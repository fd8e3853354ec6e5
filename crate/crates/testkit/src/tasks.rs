//! The bundled study tasks, as step files.

pub const L1: &str = include_str!("../../gateway/tasks/l1-office-patrol.txt");
pub const L2: &str = include_str!("../../gateway/tasks/l2-area-introduction.txt");
pub const H1: &str = include_str!("../../gateway/tasks/h1-visitor-guidance.txt");
pub const H2: &str = include_str!("../../gateway/tasks/h2-employee-gathering.txt");

/// (name, step file, minimum command count).
pub const TIERS: [(&str, &str, usize); 4] = [("L1", L1, 4), ("L2", L2, 4), ("H1", H1, 8), ("H2", H2, 8)];

pub fn step_lines(file: &str) -> Vec<String> {
    file.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect()
}
