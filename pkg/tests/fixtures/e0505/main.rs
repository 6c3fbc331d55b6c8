fn main() {
    let s = String::from("hi");
    let r = &s;
    let moved = s;
    let _n = r.len();
    drop(moved);
}
