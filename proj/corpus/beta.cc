main (\(x: {} Top) x) (\(y: {} Top) y)
