#ext returns, regions
alias Unit = {} Top

def unit = \(u: Unit) u

-- Ill-typed: a pointer leaves its region through a non-local return.
main ! (handle k : {*} Ptr[Unit] in region r in return k (new r [Unit] unit))
