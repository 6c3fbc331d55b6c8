fn main() {
    let s = String::from("hi");
    let moved = s;
    println!("{s} {moved}");

    let frozen = 1;
    let r = &mut frozen;
    *r = 2;
}
