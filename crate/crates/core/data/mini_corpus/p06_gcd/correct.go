package main

import "fmt"

func gcd(a, b int) int {
	for b != 0 {
		a, b = b, a%b
	}
	return a
}

func main() {
	var x, y int
	fmt.Scan(&x, &y)
	fmt.Println(gcd(x, y))
}
