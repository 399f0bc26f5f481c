#ext effects
alias Unit = {} Top

def unit = \(u: Unit) u

-- A thunk calling y would run outside the handler of y.
main handle x : Eff[{*} forall(u: Unit) Unit, Unit] = handler(thunk, k) => thunk unit in
  handle y : Eff[Unit, Unit] = handler(a, k2) => k2 a in
    do x (\(u: Unit) do y u)
