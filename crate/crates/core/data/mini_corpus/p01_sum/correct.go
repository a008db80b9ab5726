package main

import "fmt"

func main() {
	var a, b int64
	fmt.Scan(&a, &b)
	total := a + b
	fmt.Println(total)
}
