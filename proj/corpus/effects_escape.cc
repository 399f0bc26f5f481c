#ext effects
alias Unit = {} Top

-- The handled program returns a function that still uses x.
main handle x : Eff[Unit, Unit] = handler(y, k) => k y in \(y: Unit) do x y
