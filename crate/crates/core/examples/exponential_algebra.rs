//! Truncated exponentials of nilpotent matrices over F_p[x] and the
//! correspondence between Higgs fields and modules over Sym^{<=r} T.

use charp_hodge::higgs::{armodule_to_higgs, higgs_to_armodule, trunc_exp, HiggsLocal};
use charp_hodge::matrix::{FormMatrix, Matrix};
use charp_hodge::ring::{Modulus, Ring, Var};

fn main() -> charp_hodge::Result<()> {
    let ring = Ring::polynomial(vec![Var::ordinary("x")], Modulus::new(5, 1)?)?;
    let n = Matrix::from_strs(&ring, &[&["0", "x", "1"], &["0", "0", "x^2"], &["0", "0", "0"]])?;

    let e = trunc_exp(&n, 4)?;
    println!("exp(N) =\n{e:?}");
    println!("exp(N) exp(-N) is the identity: {}", e.mul(&trunc_exp(&n.neg(), 4)?).is_identity());

    match trunc_exp(&n, 5) {
        Err(err) => println!("order 5 at p = 5 is refused: {err}"),
        Ok(_) => println!("unexpected: order 5 accepted"),
    }

    let higgs = HiggsLocal::new(FormMatrix::from_components(&ring, vec![n]))?;
    let module = higgs_to_armodule(&higgs, higgs.exponent())?;
    println!(
        "Higgs field of exponent {} gives a module of rank {} over an algebra of dimension {}",
        higgs.exponent(),
        module.rank(),
        module.algebra().dim()
    );
    println!("round trip recovers the field: {}", armodule_to_higgs(&module) == higgs);
    Ok(())
}
