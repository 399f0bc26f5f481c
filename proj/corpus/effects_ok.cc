#ext effects
alias Unit = {} Top

def unit = \(u: Unit) u

-- The handler resumes twice; the continuation reinstates the handler.
main handle x : Eff[Unit, Unit] = handler(y, k) => k (k y) in
  (\(a: Unit) do x a) (do x unit)
