package main

import "fmt"

func isEven(x int) bool {
	return x%2 != 1
}

func main() {
	var n int
	fmt.Scan(&n)
	count := 0
	for i := 0; i < n; i++ {
		var x int
		fmt.Scan(&x)
		if isEven(x) {
			count++
		}
	}
	fmt.Println(count)
}
