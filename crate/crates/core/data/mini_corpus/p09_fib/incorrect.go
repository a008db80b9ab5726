package main

import "fmt"

const mod = 1000000007

func main() {
	var n int
	fmt.Scan(&n)
	a, b := 0, 1
	for i := 0; i < n; i++ {
		a, b = b, a+b%mod
	}
	fmt.Println(a % mod)
}
