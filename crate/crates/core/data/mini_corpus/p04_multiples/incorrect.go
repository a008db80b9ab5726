package main

import "fmt"

func main() {
	var n int64
	fmt.Scan(&n)
	var acc int64
	for k := int64(1); k <= n; k++ {
		if k%3 == 0 {
			acc += k
		}
		if k%5 == 0 {
			acc += k
		}
	}
	fmt.Println(acc)
}
