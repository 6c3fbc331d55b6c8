fn main() {
    let mut n = 1;
    let r = &mut n;
    let _copy = n;
    *r = 2;
}
